#pragma once

#include "wbn/dataset.hpp"
#include "wbn/trainer.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wbn {

inline constexpr const char* kDataDirEnv = "WBN_MNIST_DIR";

struct DataPaths {
    std::filesystem::path train_images;
    std::filesystem::path train_labels;
    std::filesystem::path test_images;
    std::filesystem::path test_labels;

    // Standard MNIST file names inside `dir`.
    static DataPaths in_directory(const std::filesystem::path& dir);
};

struct ExperimentConfig {
    DataPaths data;
    std::string experiment_id = "i"; // "i", "ii", "iii" or "custom"
    ExperimentSpec custom;           // used when experiment_id == "custom"
    std::vector<Method> methods{Method::LfSbn, Method::WlfSbn, Method::WlfPbn};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    TrainConfig train;               // method and seed are set per run
    std::filesystem::path output_dir = "wbn_reports";
};

// Throws InvalidConfig on unknown keys or bad values. Without data paths in
// the document, the directory named by WBN_MNIST_DIR is used.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

nlohmann::json to_json(const TrainConfig& config);

struct MnistSplits {
    RawMnist train;
    RawMnist test;
};

MnistSplits load_splits(const DataPaths& paths);

ExperimentSpec experiment_spec(const ExperimentConfig& config, const std::string& id, std::uint64_t seed);

struct RunResult {
    std::string experiment;
    ExperimentSpec spec;
    Method method = Method::WlfPbn;
    std::uint64_t seed = 0;
    TrainConfig train;
    MetricsReport metrics;
    std::vector<double> epoch_loss;
    double wall_clock_seconds = 0.0;
};

RunResult run_single(const MnistSplits& splits, const std::string& experiment_id, const ExperimentSpec& spec,
                     const TrainConfig& train);

nlohmann::json run_report_json(const RunResult& run);

// Per-method median/min/max overall accuracy and median per-class accuracy
// across seeds, for runs of one experiment. Contains no timing data.
nlohmann::json summarize(const std::vector<RunResult>& runs);

std::string report_file_name(const RunResult& run);

// Trains and evaluates every (method, seed) of the configured experiment.
// Reports and the summary are written only after every run succeeded.
std::vector<RunResult> run_experiment(const ExperimentConfig& config, std::ostream& log);

struct Table2 {
    nlohmann::json summary; // {"experiments": [...summaries...], ...}
    std::vector<RunResult> runs;
};

// All three experiments x configured methods x seeds.
Table2 run_table2(const ExperimentConfig& config, std::ostream& log, bool write_files = true);

// Grid of median accuracies laid out like the published table.
std::string format_table2(const nlohmann::json& summary);

double median(std::vector<double> values);

} // namespace wbn
