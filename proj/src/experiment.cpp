#include "wbn/experiment.hpp"

#include "wbn/error.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace wbn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kPresetIds{"i", "ii", "iii"};

[[noreturn]] void bad_config(const std::string& what)
{
    fail(ErrorCode::InvalidConfig, what);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object()) {
        bad_config(where + " must be an object");
    }
    for (const auto& item : obj.items()) {
        if (!allowed.contains(item.key())) {
            bad_config("unknown key '" + item.key() + "' in " + where);
        }
    }
}

template <typename T>
T get_as(const json& obj, const char* key, T fallback)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        bad_config(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::size_t get_count(const json& obj, const char* key, std::size_t fallback)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        bad_config(std::string("'") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

std::pair<std::size_t, std::size_t> get_pair(const json& obj, const char* key)
{
    if (!obj.contains(key) || !obj.at(key).is_array() || obj.at(key).size() != 2) {
        bad_config(std::string("custom.") + key + " must be [majority, minority]");
    }
    const json& arr = obj.at(key);
    for (const json& v : arr) {
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            bad_config(std::string("custom.") + key + " entries must be non-negative integers");
        }
    }
    return {arr[0].get<std::size_t>(), arr[1].get<std::size_t>()};
}

TrainConfig parse_train(const json& obj)
{
    reject_unknown_keys(obj,
                        {"batch_size", "epochs", "hidden_width", "learning_rate", "adam_beta1", "adam_beta2",
                         "adam_epsilon", "bn_epsilon", "class_balanced_beta"},
                        "train");
    TrainConfig t;
    t.batch_size = get_count(obj, "batch_size", t.batch_size);
    t.epochs = get_count(obj, "epochs", t.epochs);
    t.hidden_width = get_count(obj, "hidden_width", t.hidden_width);
    t.adam.learning_rate = get_as<double>(obj, "learning_rate", t.adam.learning_rate);
    t.adam.beta1 = get_as<double>(obj, "adam_beta1", t.adam.beta1);
    t.adam.beta2 = get_as<double>(obj, "adam_beta2", t.adam.beta2);
    t.adam.epsilon = get_as<double>(obj, "adam_epsilon", t.adam.epsilon);
    t.bn_epsilon = get_as<double>(obj, "bn_epsilon", t.bn_epsilon);
    if (obj.contains("class_balanced_beta") && !obj.at("class_balanced_beta").is_null()) {
        t.beta = get_as<double>(obj, "class_balanced_beta", 0.0);
    }
    try {
        validate(t);
    } catch (const Error& e) {
        bad_config(e.what());
    }
    return t;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_json(const fs::path& path, const json& doc)
{
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::Io, "cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

std::string percent(double x)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << 100.0 * x << '%';
    return s.str();
}

} // namespace

DataPaths DataPaths::in_directory(const fs::path& dir)
{
    return {dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte", dir / "t10k-images-idx3-ubyte",
            dir / "t10k-labels-idx1-ubyte"};
}

ExperimentConfig parse_experiment_config(const json& doc)
{
    reject_unknown_keys(doc,
                        {"data_dir", "train_images", "train_labels", "test_images", "test_labels", "experiment",
                         "custom", "methods", "seeds", "output_dir", "train"},
                        "config");
    ExperimentConfig cfg;

    fs::path data_dir;
    if (doc.contains("data_dir")) {
        data_dir = get_as<std::string>(doc, "data_dir", "");
    } else if (const char* env = std::getenv(kDataDirEnv)) {
        data_dir = env;
    }
    cfg.data = DataPaths::in_directory(data_dir);
    auto override_path = [&](const char* key, fs::path& target) {
        if (doc.contains(key)) {
            target = get_as<std::string>(doc, key, "");
        }
    };
    override_path("train_images", cfg.data.train_images);
    override_path("train_labels", cfg.data.train_labels);
    override_path("test_images", cfg.data.test_images);
    override_path("test_labels", cfg.data.test_labels);
    if (data_dir.empty() && !(doc.contains("train_images") && doc.contains("train_labels") &&
                              doc.contains("test_images") && doc.contains("test_labels"))) {
        bad_config(std::string("no data_dir in config and ") + kDataDirEnv + " is not set");
    }

    cfg.experiment_id = get_as<std::string>(doc, "experiment", cfg.experiment_id);
    if (cfg.experiment_id == "custom") {
        if (!doc.contains("custom")) {
            bad_config("experiment 'custom' needs a 'custom' section");
        }
        const json& c = doc.at("custom");
        reject_unknown_keys(c, {"majority_digit", "minority_digit", "train_counts", "test_counts"}, "custom");
        cfg.custom.majority_digit = get_as<int>(c, "majority_digit", -1);
        cfg.custom.minority_digit = get_as<int>(c, "minority_digit", -1);
        std::tie(cfg.custom.train_majority_count, cfg.custom.train_minority_count) = get_pair(c, "train_counts");
        std::tie(cfg.custom.test_majority_count, cfg.custom.test_minority_count) = get_pair(c, "test_counts");
        if (cfg.custom.majority_digit < 0 || cfg.custom.majority_digit > 9 || cfg.custom.minority_digit < 0 ||
            cfg.custom.minority_digit > 9 || cfg.custom.majority_digit == cfg.custom.minority_digit) {
            bad_config("custom digits must be two different values in 0-9");
        }
    } else if (std::find(kPresetIds.begin(), kPresetIds.end(), cfg.experiment_id) == kPresetIds.end()) {
        bad_config("experiment must be one of i, ii, iii, custom");
    }

    if (doc.contains("methods")) {
        const auto names = get_as<std::vector<std::string>>(doc, "methods", {});
        cfg.methods.clear();
        for (const auto& name : names) {
            cfg.methods.push_back(parse_method(name));
        }
        if (cfg.methods.empty()) {
            bad_config("methods must not be empty");
        }
    }
    if (doc.contains("seeds")) {
        cfg.seeds = get_as<std::vector<std::uint64_t>>(doc, "seeds", {});
        if (cfg.seeds.empty()) {
            bad_config("seeds must not be empty");
        }
    }
    if (doc.contains("output_dir")) {
        cfg.output_dir = get_as<std::string>(doc, "output_dir", "");
    }
    if (doc.contains("train")) {
        cfg.train = parse_train(doc.at("train"));
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::InvalidConfig, "cannot open config " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        bad_config(path.string() + ": " + e.what());
    }
    return parse_experiment_config(doc);
}

json to_json(const TrainConfig& t)
{
    return {
        {"method", method_name(t.method)},
        {"batch_size", t.batch_size},
        {"epochs", t.epochs},
        {"seed", t.seed},
        {"hidden_width", t.hidden_width},
        {"learning_rate", t.adam.learning_rate},
        {"adam_beta1", t.adam.beta1},
        {"adam_beta2", t.adam.beta2},
        {"adam_epsilon", t.adam.epsilon},
        {"bn_epsilon", t.bn_epsilon},
        {"class_balanced_beta", t.beta ? json(*t.beta) : json(nullptr)},
    };
}

MnistSplits load_splits(const DataPaths& paths)
{
    return {load_mnist(paths.train_images, paths.train_labels), load_mnist(paths.test_images, paths.test_labels)};
}

ExperimentSpec experiment_spec(const ExperimentConfig& config, const std::string& id, std::uint64_t seed)
{
    if (id == "custom") {
        ExperimentSpec spec = config.custom;
        spec.seed = seed;
        return spec;
    }
    return experiment_preset(id, seed);
}

RunResult run_single(const MnistSplits& splits, const std::string& experiment_id, const ExperimentSpec& spec,
                     const TrainConfig& train)
{
    const auto start = std::chrono::steady_clock::now();
    const auto [train_set, test_set] = build_experiment(splits.train, splits.test, spec);
    const TrainedModel model = wbn::train(train, train_set);

    RunResult run;
    run.experiment = experiment_id;
    run.spec = spec;
    run.method = train.method;
    run.seed = train.seed;
    run.train = train;
    run.metrics = evaluate(model.network, test_set);
    run.epoch_loss = model.epoch_loss;
    run.wall_clock_seconds = seconds_since(start);
    return run;
}

json run_report_json(const RunResult& run)
{
    return {
        {"schema", "wbn.run_report/1"},
        {"experiment", run.experiment},
        {"method", method_name(run.method)},
        {"method_label", method_label(run.method)},
        {"seed", run.seed},
        {"class_names", run.metrics.class_names},
        {"train_counts", {run.spec.train_majority_count, run.spec.train_minority_count}},
        {"test_counts", {run.spec.test_majority_count, run.spec.test_minority_count}},
        {"config", to_json(run.train)},
        {"per_class_accuracy", run.metrics.per_class_accuracy},
        {"overall_accuracy", run.metrics.overall_accuracy},
        {"confusion", run.metrics.confusion},
        {"epoch_loss", run.epoch_loss},
        {"wall_clock_seconds", run.wall_clock_seconds},
    };
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        return 0.0;
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

json summarize(const std::vector<RunResult>& runs)
{
    json out = {{"schema", "wbn.summary/1"}};
    if (runs.empty()) {
        out["methods"] = json::array();
        return out;
    }
    out["experiment"] = runs.front().experiment;
    out["class_names"] = runs.front().metrics.class_names;

    std::vector<Method> order;
    std::map<Method, std::vector<const RunResult*>> by_method;
    std::set<std::uint64_t> seeds;
    for (const RunResult& run : runs) {
        if (!by_method.contains(run.method)) {
            order.push_back(run.method);
        }
        by_method[run.method].push_back(&run);
        seeds.insert(run.seed);
    }
    out["seeds"] = std::vector<std::uint64_t>(seeds.begin(), seeds.end());

    json methods = json::array();
    for (Method m : order) {
        const auto& group = by_method[m];
        std::vector<double> overall;
        json by_seed = json::object();
        const std::size_t k = group.front()->metrics.per_class_accuracy.size();
        std::vector<std::vector<double>> per_class(k);
        for (const RunResult* run : group) {
            overall.push_back(run->metrics.overall_accuracy);
            by_seed[std::to_string(run->seed)] = run->metrics.overall_accuracy;
            for (std::size_t c = 0; c < k; ++c) {
                per_class[c].push_back(run->metrics.per_class_accuracy[c]);
            }
        }
        std::vector<double> per_class_median;
        for (auto& values : per_class) {
            per_class_median.push_back(median(values));
        }
        methods.push_back({
            {"method", method_name(m)},
            {"label", method_label(m)},
            {"runs", group.size()},
            {"overall", {{"median", median(overall)},
                         {"min", *std::min_element(overall.begin(), overall.end())},
                         {"max", *std::max_element(overall.begin(), overall.end())}}},
            {"per_class_median", per_class_median},
            {"overall_by_seed", by_seed},
        });
    }
    out["methods"] = methods;
    return out;
}

std::string report_file_name(const RunResult& run)
{
    return run.experiment + "_" + std::string(method_name(run.method)) + "_seed" + std::to_string(run.seed) + ".json";
}

namespace {

std::vector<RunResult> run_grid(const ExperimentConfig& config, const MnistSplits& splits, const std::string& id,
                                std::ostream& log)
{
    std::vector<RunResult> runs;
    for (Method method : config.methods) {
        for (std::uint64_t seed : config.seeds) {
            TrainConfig train = config.train;
            train.method = method;
            train.seed = seed;
            RunResult run = run_single(splits, id, experiment_spec(config, id, seed), train);
            log << "[" << id << "] " << method_label(method) << " seed " << seed << ": overall "
                << percent(run.metrics.overall_accuracy) << " (" << std::fixed << std::setprecision(1)
                << run.wall_clock_seconds << " s)" << std::endl;
            runs.push_back(std::move(run));
        }
    }
    return runs;
}

void write_reports(const fs::path& dir, const std::vector<RunResult>& runs)
{
    for (const RunResult& run : runs) {
        write_json(dir / report_file_name(run), run_report_json(run));
    }
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    }
}

} // namespace

std::vector<RunResult> run_experiment(const ExperimentConfig& config, std::ostream& log)
{
    validate(config.train);
    const MnistSplits splits = load_splits(config.data);
    std::vector<RunResult> runs = run_grid(config, splits, config.experiment_id, log);

    ensure_dir(config.output_dir);
    write_reports(config.output_dir, runs);
    write_json(config.output_dir / ("summary_" + config.experiment_id + ".json"), summarize(runs));
    return runs;
}

Table2 run_table2(const ExperimentConfig& config, std::ostream& log, bool write_files)
{
    validate(config.train);
    const MnistSplits splits = load_splits(config.data);

    Table2 table;
    json experiments = json::array();
    for (const std::string& id : kPresetIds) {
        std::vector<RunResult> runs = run_grid(config, splits, id, log);
        experiments.push_back(summarize(runs));
        table.runs.insert(table.runs.end(), std::make_move_iterator(runs.begin()), std::make_move_iterator(runs.end()));
    }
    table.summary = {
        {"schema", "wbn.table2/1"},
        {"seeds", config.seeds},
        {"train", to_json(config.train)},
        {"experiments", experiments},
    };
    table.summary["train"].erase("method");
    table.summary["train"].erase("seed");

    if (write_files) {
        ensure_dir(config.output_dir);
        write_reports(config.output_dir, table.runs);
        write_json(config.output_dir / "table2.json", table.summary);
    }
    return table;
}

std::string format_table2(const json& summary)
{
    std::ostringstream out;
    const json& experiments = summary.at("experiments");

    // Columns per experiment: the two digits in ascending order, then overall.
    std::vector<std::vector<std::pair<int, std::size_t>>> digit_order;
    for (const json& exp : experiments) {
        std::vector<std::pair<int, std::size_t>> digits;
        const auto names = exp.at("class_names").get<std::vector<int>>();
        for (std::size_t c = 0; c < names.size(); ++c) {
            digits.emplace_back(names[c], c);
        }
        std::sort(digits.begin(), digits.end());
        digit_order.push_back(digits);
    }

    constexpr int kLabelWidth = 24;
    constexpr int kCellWidth = 8;
    out << std::left << std::setw(kLabelWidth) << "";
    for (std::size_t e = 0; e < experiments.size(); ++e) {
        const std::string title = "(" + experiments[e].at("experiment").get<std::string>() + ")";
        out << "| " << std::setw(kCellWidth * 3) << title;
    }
    out << "|\n" << std::setw(kLabelWidth) << "";
    for (std::size_t e = 0; e < experiments.size(); ++e) {
        out << "| ";
        for (const auto& [digit, idx] : digit_order[e]) {
            out << std::setw(kCellWidth) << digit;
        }
        out << std::setw(kCellWidth) << "overall";
    }
    out << "|\n";

    if (experiments.empty()) {
        return out.str();
    }
    for (const json& method : experiments.front().at("methods")) {
        const std::string name = method.at("method").get<std::string>();
        const std::string label = "(" + std::string(method_letter(parse_method(name))) + ") " +
                                  method.at("label").get<std::string>();
        out << std::setw(kLabelWidth) << label;
        for (std::size_t e = 0; e < experiments.size(); ++e) {
            out << "| ";
            const json* row = nullptr;
            for (const json& m : experiments[e].at("methods")) {
                if (m.at("method") == name) {
                    row = &m;
                }
            }
            if (row == nullptr) {
                out << std::setw(kCellWidth * 3) << "-";
                continue;
            }
            const auto per_class = row->at("per_class_median").get<std::vector<double>>();
            for (const auto& [digit, idx] : digit_order[e]) {
                out << std::setw(kCellWidth) << percent(per_class[idx]);
            }
            out << std::setw(kCellWidth) << percent(row->at("overall").at("median").get<double>());
        }
        out << "|\n";
    }
    return out.str();
}

} // namespace wbn
