#include "cgain/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "cgain/error.hpp"

namespace cgain {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    if (trim(s).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    throw UsageError("invalid value '" + std::string(value) + "' for " + std::string(key) + ": expected " +
                     std::string(expected));
}

std::uint64_t to_u64(std::string_view key, std::string_view value) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
        bad_value(key, value, "a non-negative integer");
    }
    return out;
}

double to_double(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty() || !std::isfinite(out)) {
        bad_value(key, value, "a finite number");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    bad_value(key, value, "true or false");
}

std::string from_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F format) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += format(items[i]);
    }
    return out;
}

struct Entry {
    std::string_view key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define STRING_ENTRY(name, field)                                                      \
    Entry {                                                                            \
        name, [](RunConfig& c, std::string_view v) { c.field = std::string(v); },      \
            [](const RunConfig& c) { return c.field; }                                 \
    }
#define SIZE_ENTRY(name, field)                                                                     \
    Entry {                                                                                         \
        name, [](RunConfig& c, std::string_view v) { c.field = to_u64(name, v); },                  \
            [](const RunConfig& c) { return std::to_string(c.field); }                              \
    }
#define DOUBLE_ENTRY(name, field)                                                                   \
    Entry {                                                                                         \
        name, [](RunConfig& c, std::string_view v) { c.field = to_double(name, v); },               \
            [](const RunConfig& c) { return from_double(c.field); }                                 \
    }
#define BOOL_ENTRY(name, field)                                                                     \
    Entry {                                                                                         \
        name, [](RunConfig& c, std::string_view v) { c.field = to_bool(name, v); },                 \
            [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }              \
    }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table{
        STRING_ENTRY("command", command),
        STRING_ENTRY("schema", schema_path),
        STRING_ENTRY("data", data_path),
        STRING_ENTRY("label", label_column),
        STRING_ENTRY("positive_label", positive_label),
        STRING_ENTRY("model", model_path),
        STRING_ENTRY("output", output_dir),
        Entry{"methods",
              [](RunConfig& c, std::string_view v) {
                  c.methods.clear();
                  for (const auto item : split_list(v)) c.methods.push_back(parse_method(item));
              },
              [](const RunConfig& c) { return join(c.methods, [](Method m) { return std::string(to_string(m)); }); }},
        Entry{"proportions",
              [](RunConfig& c, std::string_view v) {
                  c.proportions.clear();
                  for (const auto item : split_list(v)) c.proportions.push_back(to_double("proportions", item));
              },
              [](const RunConfig& c) { return join(c.proportions, from_double); }},
        SIZE_ENTRY("folds", folds),
        DOUBLE_ENTRY("ridge", ridge),
        Entry{"ranks",
              [](RunConfig& c, std::string_view v) {
                  c.ranks.clear();
                  for (const auto item : split_list(v)) c.ranks.push_back(to_u64("ranks", item));
              },
              [](const RunConfig& c) { return join(c.ranks, [](std::size_t r) { return std::to_string(r); }); }},
        DOUBLE_ENTRY("validation_fraction", validation_fraction),
        SIZE_ENTRY("imputations", imputations),
        BOOL_ENTRY("modal_completion", modal_completion),
        SIZE_ENTRY("epochs", epochs),
        SIZE_ENTRY("batch_size", batch_size),
        DOUBLE_ENTRY("hint_rate", hint_rate),
        DOUBLE_ENTRY("lambda", lambda),
        DOUBLE_ENTRY("learning_rate", learning_rate),
        BOOL_ENTRY("hinted_loss_only", hinted_loss_only),
        BOOL_ENTRY("refuzzify_each_epoch", refuzzify_each_epoch),
        Entry{"coding",
              [](RunConfig& c, std::string_view v) {
                  if (v == "fuzzy") c.coding = Coding::fuzzy;
                  else if (v == "hard") c.coding = Coding::hard;
                  else bad_value("coding", v, "fuzzy or hard");
              },
              [](const RunConfig& c) { return std::string(c.coding == Coding::fuzzy ? "fuzzy" : "hard"); }},
        SIZE_ENTRY("ae_epochs", ae_epochs),
        SIZE_ENTRY("synthetic_rows", synthetic_rows),
        SIZE_ENTRY("synthetic_features", synthetic_features),
        DOUBLE_ENTRY("synthetic_noise", synthetic_noise),
        SIZE_ENTRY("seed", seed),
        SIZE_ENTRY("threads", threads),
    };
    return table;
}

#undef STRING_ENTRY
#undef SIZE_ENTRY
#undef DOUBLE_ENTRY
#undef BOOL_ENTRY

void require(bool ok, const std::string& message) {
    if (!ok) throw UsageError(message);
}

}  // namespace

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    for (const auto& e : entries()) {
        if (e.key == key) {
            e.set(config, value);
            return;
        }
    }
    throw UsageError("unknown configuration key '" + std::string(key) + "'");
}

RunConfig parse_config(std::string_view text, RunConfig base) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
            }
            try {
                apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
            } catch (const UsageError& e) {
                throw UsageError("config line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

void validate(const RunConfig& c) {
    require(c.folds >= 2, "folds must be at least 2");
    require(c.ridge >= 0.0, "ridge must be non-negative");
    for (const double p : c.proportions) require(p >= 0.0 && p < 1.0, "proportions must lie in [0, 1)");
    for (const std::size_t r : c.ranks) require(r >= 1, "ranks must be positive");
    require(c.validation_fraction > 0.0 && c.validation_fraction < 1.0, "validation_fraction must lie in (0, 1)");
    require(c.imputations >= 1, "imputations must be at least 1");
    require(c.batch_size >= 1, "batch_size must be at least 1");
    require(c.hint_rate >= 0.0 && c.hint_rate <= 1.0, "hint_rate must lie in [0, 1]");
    require(c.lambda >= 0.0, "lambda must be non-negative");
    require(c.learning_rate > 0.0, "learning_rate must be positive");
    require(c.synthetic_noise >= 0.0 && c.synthetic_noise <= 1.0, "synthetic_noise must lie in [0, 1]");
    require(c.synthetic_features >= 1, "synthetic_features must be positive");
}

std::string manifest_text(const RunConfig& config) {
    std::string out;
    for (const auto& e : entries()) {
        out += std::string(e.key) + " = " + e.get(config) + "\n";
    }
    return out;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& e : entries()) out.emplace_back(e.key);
    return out;
}

GainConfig gain_config(const RunConfig& c) {
    GainConfig g;
    g.epochs = c.epochs;
    g.batch_size = c.batch_size;
    g.hint_rate = c.hint_rate;
    g.lambda = c.lambda;
    g.optimizer.learning_rate = c.learning_rate;
    g.hinted_loss_only = c.hinted_loss_only;
    g.refuzzify_each_epoch = c.refuzzify_each_epoch;
    g.seed = derive_seed(c.seed, "gain");
    return g;
}

AutoencoderConfig autoencoder_config(const RunConfig& c) {
    AutoencoderConfig a;
    a.epochs = c.ae_epochs;
    a.batch_size = c.batch_size;
    a.optimizer.learning_rate = c.learning_rate;
    a.seed = derive_seed(c.seed, "autoencoder");
    return a;
}

BenchmarkConfig benchmark_config(const RunConfig& c) {
    BenchmarkConfig b;
    b.methods = c.methods;
    b.proportions = c.proportions;
    b.folds = c.folds;
    b.ridge = c.ridge;
    b.ranks = c.ranks;
    b.validation_fraction = c.validation_fraction;
    b.gain = gain_config(c);
    b.imputations = c.imputations;
    b.modal_completion = c.modal_completion;
    b.autoencoder = autoencoder_config(c);
    b.seed = c.seed;
    b.threads = c.threads;
    return b;
}

}  // namespace cgain
