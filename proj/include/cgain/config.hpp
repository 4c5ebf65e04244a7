#pragma once

// Run configuration: a flat `key = value` text format ('#' starts a comment).
// Every key is validated; unknown keys are rejected. The manifest written
// next to each run's outputs uses the same format and lists every key, so
// feeding it back reproduces the run.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cgain/harness.hpp"

namespace cgain {

struct RunConfig {
    std::string command;
    std::string schema_path;
    std::string data_path;
    std::string label_column;
    std::string positive_label;
    std::string model_path;
    std::string output_dir = ".";

    std::vector<Method> methods;
    std::vector<double> proportions;
    std::size_t folds = 5;
    double ridge = 1.0;
    std::vector<std::size_t> ranks{4, 8, 16, 32};
    double validation_fraction = 0.2;
    std::size_t imputations = 100;
    bool modal_completion = false;

    std::size_t epochs = 500;
    std::size_t batch_size = 64;
    double hint_rate = 0.1;
    double lambda = 1.0;
    double learning_rate = 1e-3;
    bool hinted_loss_only = true;
    bool refuzzify_each_epoch = false;
    Coding coding = Coding::fuzzy;
    std::size_t ae_epochs = 500;

    // Synthetic corpus for `losses` when no data path is given.
    std::size_t synthetic_rows = 1000;
    std::size_t synthetic_features = 15;
    double synthetic_noise = 0.2;

    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

/// Applies one setting; throws UsageError for unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Parses a config file body on top of `base`.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Range checks across all fields.
void validate(const RunConfig& config);

/// Every key with its current value, one `key = value` per line.
std::string manifest_text(const RunConfig& config);

std::vector<std::string> config_keys();

GainConfig gain_config(const RunConfig& config);
AutoencoderConfig autoencoder_config(const RunConfig& config);
BenchmarkConfig benchmark_config(const RunConfig& config);

}  // namespace cgain
