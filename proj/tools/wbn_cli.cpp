// wbn: reproduce the imbalanced-MNIST experiments and verify gradients.
//
//   wbn run --config <path> [--seeds 1,2,3] [--method a|b|c]
//   wbn gradcheck [--mode standard|weighted] [--seed N]
//   wbn table2 --config <path> [--seeds 1,2,3]
//
// Exit codes: 0 success, 1 verification failure, 2 usage/config error.

#include "wbn/error.hpp"
#include "wbn/experiment.hpp"
#include "wbn/gradcheck.hpp"
#include "wbn/kernels.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;

wbn::ExperimentConfig load_config(const std::string& path, const std::vector<std::uint64_t>& seeds,
                                  const std::vector<std::string>& methods)
{
    wbn::ExperimentConfig cfg = wbn::load_experiment_config(path);
    if (!seeds.empty()) {
        cfg.seeds = seeds;
    }
    if (!methods.empty()) {
        cfg.methods.clear();
        for (const auto& m : methods) {
            cfg.methods.push_back(wbn::parse_method(m));
        }
    }
    return cfg;
}

nlohmann::json report_json(const wbn::GradCheckReport& report, wbn::BnMode mode, std::uint64_t seed)
{
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : report.blocks) {
        blocks.push_back({{"name", b.name}, {"max_rel_error", b.max_rel_error}, {"worst_index", b.worst_index}});
    }
    return {
        {"mode", wbn::to_string(mode)},
        {"seed", seed},
        {"max_rel_error", report.max_rel_error},
        {"worst", report.worst_block + "[" + std::to_string(report.worst_index) + "]"},
        {"tolerance", report.tolerance},
        {"pass", report.pass},
        {"blocks", blocks},
    };
}

int gradcheck_command(const std::optional<std::string>& mode_name, std::uint64_t seed, bool inject_fault)
{
    std::vector<wbn::BnMode> modes;
    if (!mode_name) {
        modes = {wbn::BnMode::Standard, wbn::BnMode::Weighted};
    } else if (*mode_name == "standard") {
        modes = {wbn::BnMode::Standard};
    } else {
        modes = {wbn::BnMode::Weighted};
    }

    bool all_pass = true;
    for (wbn::BnMode mode : modes) {
        wbn::InstanceShape shape;
        shape.skewed = mode == wbn::BnMode::Weighted;
        const auto inst = wbn::random_instance(seed, mode, shape);
        wbn::GradCheckOptions options;
        if (inject_fault) {
            options.tamper = [](wbn::Gradients& g) { g.layers.front().weights.values()[0] *= 2.0; };
        }
        const auto report = wbn::check_gradients(inst.net, inst.inputs, inst.targets, inst.weights, options);
        std::cout << report_json(report, mode, seed).dump() << std::endl;
        all_pass = all_pass && report.pass;
    }
    return all_pass ? kExitOk : kExitVerification;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Weighted batch normalization for imbalanced classification"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> methods;

    auto* run = app.add_subcommand("run", "Train and evaluate one experiment over methods and seeds");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--seeds", seeds, "Override the config's seed list")->delimiter(',');
    run->add_option("--method", methods, "Restrict to methods a|b|c")->delimiter(',');

    std::optional<std::string> mode;
    std::uint64_t gc_seed = 1;
    bool inject_fault = false;
    auto* gradcheck = app.add_subcommand("gradcheck", "Check analytic gradients against finite differences");
    gradcheck->add_option("--mode", mode, "standard or weighted (default: both)")
        ->check(CLI::IsMember({"standard", "weighted"}));
    gradcheck->add_option("--seed", gc_seed, "Seed for the random network and batch");
    gradcheck->add_flag("--inject-fault", inject_fault, "Corrupt one analytic gradient entry (test hook)");

    auto* table2 = app.add_subcommand("table2", "Run all method x experiment cells and print the grid");
    table2->add_option("--config", config_path, "Experiment config (JSON)")->required();
    table2->add_option("--seeds", seeds, "Override the config's seed list")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gradcheck) {
            return gradcheck_command(mode, gc_seed, inject_fault);
        }
        std::cerr << "kernels: " << wbn::kernels::active().name << std::endl;
        if (*run) {
            const auto cfg = load_config(config_path, seeds, methods);
            wbn::run_experiment(cfg, std::cerr);
            std::cout << "wrote " << cfg.methods.size() * cfg.seeds.size() << " reports and summary_"
                      << cfg.experiment_id << ".json to " << cfg.output_dir.string() << std::endl;
            return kExitOk;
        }
        if (*table2) {
            const auto cfg = load_config(config_path, seeds, {});
            const auto table = wbn::run_table2(cfg, std::cerr);
            std::cout << wbn::format_table2(table.summary);
            return kExitOk;
        }
    } catch (const wbn::Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitUsage;
    }
    return kExitUsage;
}
