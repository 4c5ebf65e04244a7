// cgain: command-line front end for categorical GAIN imputation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cgain/config.hpp"
#include "cgain/csv_io.hpp"
#include "cgain/error.hpp"
#include "cgain/gain.hpp"
#include "cgain/harness.hpp"
#include "cgain/synthetic.hpp"

namespace fs = std::filesystem;
using namespace cgain;

namespace {

constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

struct Input {
    FeatureSchema schema;
    CsvTable table;
    LabeledRecords data;
};

std::string require_path(const std::string& value, const char* key) {
    if (value.empty()) throw UsageError(std::string("missing required setting '") + key + "'");
    return value;
}

Input load_input(const RunConfig& c) {
    Input in;
    in.schema = FeatureSchema::load(require_path(c.schema_path, "schema"));
    in.table = read_csv(require_path(c.data_path, "data"));
    in.data = records_from_table(in.table, in.schema, c.label_column);
    return in;
}

fs::path output_path(const RunConfig& c, const std::string& name) { return fs::path(c.output_dir) / name; }

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << body;
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

void prepare_output(const RunConfig& c) {
    fs::create_directories(c.output_dir);
    write_file(output_path(c, "manifest.txt"), manifest_text(c));
}

std::string trace_text(const TrainTrace& trace) {
    std::ostringstream out;
    write_trace_csv(out, trace);
    return out.str();
}

std::string short_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

FuzzyDataset encode(const RunConfig& c, const Input& in) {
    return encode_dataset(in.data.records, in.schema, derive_seed(c.seed, "fuzzify"), c.coding);
}

// Trains a model on `data`; writes trace.csv. Returns false on divergence.
bool train_model(const RunConfig& c, const FuzzyDataset& data, GainModel& model) {
    const GainConfig gc = gain_config(c);
    model = make_gain_model(data.schema, gc);
    try {
        write_file(output_path(c, "trace.csv"), trace_text(train(model, data, gc)));
        return true;
    } catch (const TrainingDiverged& e) {
        TrainTrace trace = e.trace();
        close_diverged_trace(trace);
        write_file(output_path(c, "trace.csv"), trace_text(trace));
        std::cerr << "training diverged: " << e.what() << '\n';
        return false;
    }
}

int cmd_inspect_schema(const RunConfig& c) {
    const FeatureSchema schema = FeatureSchema::load(require_path(c.schema_path, "schema"));
    std::printf("%-24s %-10s %5s %6s\n", "feature", "kind", "q", "offset");
    for (std::size_t j = 0; j < schema.feature_count(); ++j) {
        const auto& f = schema.feature(j);
        std::printf("%-24s %-10s %5zu %6zu\n", f.name.c_str(), std::string(to_string(f.kind)).c_str(), f.cardinality,
                    schema.offset(j));
    }
    std::printf("features %zu, coded width %zu, hash %016llx\n", schema.feature_count(), schema.total_width(),
                static_cast<unsigned long long>(schema.hash()));
    if (c.data_path.empty()) return 0;

    const Input in = load_input(c);
    std::printf("rows %zu\n", in.data.records.size());
    for (std::size_t j = 0; j < schema.feature_count(); ++j) {
        std::size_t missing = 0;
        for (const auto& r : in.data.records) missing += is_missing(r[j]) ? 1 : 0;
        if (missing) std::printf("  %s: %zu missing\n", schema.feature(j).name.c_str(), missing);
    }
    if (!in.data.labels.empty()) {
        const auto y = binary_labels(in.data.labels, c.positive_label);
        std::size_t positives = 0;
        for (const int v : y) positives += static_cast<std::size_t>(v);
        std::printf("label %s: %zu positive, %zu negative\n", c.label_column.c_str(), positives, y.size() - positives);
    }
    return 0;
}

int cmd_train(RunConfig c) {
    const Input in = load_input(c);
    if (c.model_path.empty()) c.model_path = (fs::path(c.output_dir) / "model.bin").string();
    prepare_output(c);
    GainModel model;
    if (!train_model(c, encode(c, in), model)) return exit_failure;
    save_gain_model(c.model_path, model);
    std::cout << "model written to " << c.model_path << '\n';
    return 0;
}

int cmd_impute(const RunConfig& c) {
    const Input in = load_input(c);
    const FuzzyDataset data = encode(c, in);
    prepare_output(c);

    GainModel model;
    if (!c.model_path.empty()) {
        model = load_gain_model(c.model_path, in.schema);
    } else if (!train_model(c, data, model)) {
        return exit_failure;
    }
    const ImputationResult result = impute(model, data, c.imputations, derive_seed(c.seed, "impute"));

    // Feature column of each schema feature in the input table.
    std::vector<std::size_t> column(in.schema.feature_count());
    for (std::size_t k = 0; k < in.table.header.size(); ++k) {
        if (const auto j = in.schema.find(in.table.header[k])) column[*j] = k;
    }
    const int digits = static_cast<int>(std::to_string(c.imputations).size());
    for (std::size_t d = 0; d < result.draws.size(); ++d) {
        // Only missing cells are rewritten, so observed text survives verbatim.
        CsvTable table = in.table;
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            for (std::size_t j = 0; j < in.schema.feature_count(); ++j) {
                if (!is_missing(in.data.records[i][j])) continue;
                table.rows[i][column[j]] = format_cell(result.draws[d][i][j], in.schema.feature(j));
            }
        }
        char name[64];
        std::snprintf(name, sizeof name, "completion_%0*zu.csv", digits, d + 1);
        std::ostringstream out;
        write_csv(out, table);
        write_file(output_path(c, name), out.str());
    }

    CsvTable agreement;
    for (const auto& f : in.schema.features()) agreement.header.push_back(f.name);
    for (Eigen::Index i = 0; i < result.agreement.rows(); ++i) {
        std::vector<std::string> row;
        for (Eigen::Index j = 0; j < result.agreement.cols(); ++j) row.push_back(short_number(result.agreement(i, j)));
        agreement.rows.push_back(std::move(row));
    }
    std::ostringstream out;
    write_csv(out, agreement);
    write_file(output_path(c, "agreement.csv"), out.str());
    std::cout << result.draws.size() << " completions written to " << c.output_dir << '\n';
    return 0;
}

int cmd_benchmark(const RunConfig& c) {
    if (c.methods.empty()) throw UsageError("benchmark needs at least one method");
    bool needs_proportion = false;
    for (const Method m : c.methods) needs_proportion = needs_proportion || !is_sanity_method(m);
    if (needs_proportion && c.proportions.empty()) throw UsageError("imputation methods need at least one proportion");
    require_path(c.label_column, "label");
    const Input in = load_input(c);
    const auto labels = binary_labels(in.data.labels, c.positive_label);
    prepare_output(c);

    const EvalReport report = run_benchmark(in.data.records, in.schema, labels, benchmark_config(c));
    std::ostringstream csv, json;
    write_report_csv(csv, report);
    write_report_json(json, report);
    write_file(output_path(c, "report.csv"), csv.str());
    write_file(output_path(c, "report.json"), json.str());

    for (const auto& r : report.rows) {
        const std::string prop = r.proportion ? short_number(*r.proportion) : "-";
        if (!r.error.empty()) {
            std::printf("%-5s %-14s %-9s ERROR %s\n", prop.c_str(), r.method.c_str(), r.metric.c_str(), r.error.c_str());
        } else {
            std::printf("%-5s %-14s %-9s %.3f +- %.3f\n", prop.c_str(), r.method.c_str(), r.metric.c_str(), r.mean, r.sd);
        }
    }
    return report.has_errors() ? exit_failure : 0;
}

int cmd_losses(const RunConfig& c) {
    if (c.proportions.empty()) throw UsageError("losses needs at least one proportion");
    FeatureSchema schema;
    std::vector<RawRecord> records;
    if (c.data_path.empty()) {
        auto corpus = make_dependent_corpus(c.synthetic_rows, c.synthetic_features, derive_seed(c.seed, "synthetic"),
                                            c.synthetic_noise);
        schema = std::move(corpus.schema);
        records = std::move(corpus.records);
    } else {
        Input in = load_input(c);
        schema = std::move(in.schema);
        records = std::move(in.data.records);
    }
    prepare_output(c);

    for (const double p : c.proportions) {
        const LossCurves curves = loss_curves(records, schema, p, gain_config(c), c.seed);
        const std::string suffix = "_p" + short_number(p) + ".csv";
        write_file(output_path(c, "losses_fuzzy" + suffix), trace_text(curves.fuzzy));
        write_file(output_path(c, "losses_hard" + suffix), trace_text(curves.hard));
        if (!curves.fuzzy_error.empty()) std::cerr << "fuzzy run at " << p << " diverged: " << curves.fuzzy_error << '\n';
        if (!curves.hard_error.empty()) std::cerr << "hard run at " << p << " diverged: " << curves.hard_error << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Imputation of categorical data with a fuzzy-coded GAIN"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    std::string config_path;
    app.add_option("--config", config_path, "Settings file (key = value); a run manifest replays that run");

    // One flag per settings key; flags override the settings file.
    std::map<std::string, std::string> flags;
    for (const auto& key : config_keys()) {
        if (key == "command") continue;
        app.add_option("--" + key, flags[key], "Overrides setting `" + key + "`");
    }
    const std::vector<std::pair<std::string, std::string>> commands{
        {"impute", "Train (or load) a model and write k completed CSVs plus agreement.csv"},
        {"benchmark", "Cross-validated downstream evaluation of imputation methods"},
        {"losses", "Adversarial loss traces under fuzzy and hard coding"},
        {"train", "Train a model and save it"},
        {"inspect-schema", "Print the coded layout of a schema and, with data, its missingness"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        RunConfig config;
        if (!config_path.empty()) config = load_config(config_path);
        for (const auto& [key, value] : flags) {
            if (app.count("--" + key) > 0) apply_setting(config, key, value);
        }
        if (!app.get_subcommands().empty()) config.command = app.get_subcommands().front()->get_name();
        if (config.command.empty()) throw UsageError("no command given (and none in the settings file)");
        validate(config);

        if (config.command == "impute") return cmd_impute(config);
        if (config.command == "benchmark") return cmd_benchmark(config);
        if (config.command == "losses") return cmd_losses(config);
        if (config.command == "train") return cmd_train(config);
        if (config.command == "inspect-schema") return cmd_inspect_schema(config);
        throw UsageError("unknown command '" + config.command + "'");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n' << "run with --help for the list of commands and settings\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
}
