#include "glmb/config.hpp"
#include "glmb/experiment.hpp"
#include "glmb/presets.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

glmb::Scenario load_scenario(const std::string& arg) {
    if (auto p = glmb::presets::find(arg)) return *p;
    return glmb::scenario_from_json(glmb::read_json_file(arg));
}

int run_command(const std::string& scenario_arg, const std::string& filter_path, int trials,
                std::optional<std::uint64_t> seed, const std::string& backend, std::optional<std::size_t> cap,
                const std::string& out_dir, unsigned parallel) {
    glmb::Scenario sc = load_scenario(scenario_arg);
    glmb::ExperimentConfig cfg;
    if (!filter_path.empty()) cfg = glmb::experiment_config_from_json(glmb::read_json_file(filter_path));
    if (seed) cfg.filter.seed = *seed;
    if (!backend.empty()) cfg.filter.backend = glmb::backend_from_string(backend);
    if (cap) cfg.filter.max_hypotheses = *cap;
    cfg.filter.validate();

    const auto res = glmb::run_experiment(sc, cfg, trials, parallel);
    glmb::write_outputs(out_dir, res);

    const auto& s = res.summary;
    std::fprintf(stderr, "%s: %d trials (%zu failed), backend %s, H_max %zu, mean step %.4g s -> %s\n", s.scenario.c_str(),
                 s.trials, s.failed_trials.size(), s.backend.c_str(), s.max_hypotheses, s.mean_step_time, out_dir.c_str());
    for (const auto& [t, e] : s.failed_trials) std::fprintf(stderr, "  trial %d failed: %s\n", t, e.c_str());
    return 0;
}

int compare_command(const std::string& a_path, const std::string& b_path, const std::string& out_path) {
    const auto a = glmb::summary_from_json(glmb::read_json_file(a_path));
    const auto b = glmb::summary_from_json(glmb::read_json_file(b_path));
    const auto c = glmb::compare_backends(a, b);
    const std::string text = glmb::comparison_to_json(c).dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out_path);
        os << text;
        if (!os) throw glmb::Error("cannot write " + out_path);
    }
    std::fprintf(stderr, "runtime ratio %s/%s: %s\n", a.backend.c_str(), b.backend.c_str(), c.runtime_ratio_text.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delta-GLMB tracking experiments"};
    app.require_subcommand(1);

    std::string scenario_arg, filter_path, backend, out_dir = "out";
    int trials = 1;
    std::uint64_t seed = 0;
    std::size_t cap = 0;
    unsigned parallel = 1;
    auto* run = app.add_subcommand("run", "Run Monte Carlo trials");
    run->add_option("--scenario", scenario_arg, "Scenario JSON file or preset name")->required();
    run->add_option("--filter", filter_path, "Filter JSON file");
    run->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "Filter master seed");
    run->add_option("--backend", backend, "Truncation backend")->check(CLI::IsMember({"ranked", "gibbs"}));
    auto* cap_opt = run->add_option("--cap", cap, "Hypothesis cap H_max")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--parallel", parallel, "Concurrent trials")->check(CLI::PositiveNumber);

    std::string a_path, b_path, cmp_out;
    auto* cmp = app.add_subcommand("compare", "Compare two summary files");
    cmp->add_option("a", a_path, "Reference summary.json")->required();
    cmp->add_option("b", b_path, "Other summary.json")->required();
    cmp->add_option("--out", cmp_out, "Write report here instead of stdout");

    std::string preset_name;
    auto* preset = app.add_subcommand("preset", "Print a preset scenario as JSON");
    preset->add_option("name", preset_name, "Preset name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            std::optional<std::uint64_t> s;
            if (*seed_opt) s = seed;
            std::optional<std::size_t> c;
            if (*cap_opt) c = cap;
            return run_command(scenario_arg, filter_path, trials, s, backend, c, out_dir, parallel);
        }
        if (*cmp) return compare_command(a_path, b_path, cmp_out);
        if (*preset) {
            auto p = glmb::presets::find(preset_name);
            if (!p) throw glmb::Error("unknown preset: " + preset_name);
            std::cout << glmb::scenario_to_json(*p).dump(2) << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
