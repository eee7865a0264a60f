#pragma once

// Monte Carlo experiment runner and its output files.

#include "glmb/config.hpp"
#include "glmb/filter.hpp"
#include "glmb/ospa.hpp"
#include "glmb/scenario.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace glmb {

struct RunRecord {
    int trial = 0;
    int scan = 0;
    std::size_t true_cardinality = 0;
    std::size_t estimated_cardinality = 0;
    OspaResult ospa;
    std::size_t components = 0;
    double step_time = 0.0;  ///< seconds
};

struct TrialResult {
    int trial = 0;
    bool failed = false;
    std::string error;
    std::vector<RunRecord> records;
};

struct ScanSummary {
    int scan = 0;
    std::size_t samples = 0;
    double true_cardinality = 0.0;
    double mean_cardinality = 0.0;
    double std_cardinality = 0.0;
    double mean_ospa = 0.0;
    double mean_ospa_localization = 0.0;
    double mean_ospa_cardinality = 0.0;
    double mean_components = 0.0;
    double mean_step_time = 0.0;
};

struct Summary {
    std::string scenario;
    std::string scenario_hash;
    std::string backend;
    std::size_t max_hypotheses = 0;
    int trials = 0;
    std::vector<std::pair<int, std::string>> failed_trials;
    std::vector<ScanSummary> scans;
    double mean_step_time = 0.0;
};

struct ExperimentResult {
    std::vector<TrialResult> trials;
    Summary summary;
};

inline std::string scenario_hash(const Scenario& sc) {
    const std::string text = scenario_to_json(sc).dump();
    std::uint64_t h = detail::mix64(text.size());
    for (unsigned char ch : text) h = detail::mix64(h ^ ch);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Runs one trial. Measurements come from the scenario seed and the trial id,
/// the filter seed from the filter master seed and the trial id.
inline TrialResult run_trial(const Scenario& sc, const Truth& truth, const ExperimentConfig& cfg, int trial) {
    TrialResult out;
    out.trial = trial;
    const auto scans = generate_scans(sc, truth, static_cast<std::uint64_t>(trial));
    FilterConfig fc = cfg.filter;
    fc.seed = derive_seed(cfg.filter.seed, {static_cast<std::uint64_t>(trial)});
    try {
        GlmbFilter<4, 2> filter(sc.model(), sc.birth, fc);
        for (std::size_t k = 0; k < scans.size(); ++k) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto& step = filter.step(scans[k].measurements);
            const auto t1 = std::chrono::steady_clock::now();
            const auto est = filter.estimate();

            std::vector<Vec<2>> est_pos;
            for (const auto& [label, x] : est.tracks) est_pos.emplace_back(x[0], x[1]);
            std::vector<Vec<2>> true_pos;
            for (const auto& t : truth[k]) true_pos.emplace_back(t.state[0], t.state[1]);

            RunRecord r;
            r.trial = trial;
            r.scan = static_cast<int>(k) + 1;
            r.true_cardinality = truth[k].size();
            r.estimated_cardinality = est.cardinality;
            r.ospa = ospa<2>(est_pos, true_pos, cfg.ospa);
            r.components = step.density.size();
            r.step_time = std::chrono::duration<double>(t1 - t0).count();
            out.records.push_back(r);
        }
    } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
    }
    return out;
}

inline Summary summarize(const Scenario& sc, const ExperimentConfig& cfg, const std::vector<TrialResult>& trials) {
    Summary s;
    s.scenario = sc.name;
    s.scenario_hash = scenario_hash(sc);
    s.backend = to_string(cfg.filter.backend);
    s.max_hypotheses = cfg.filter.max_hypotheses;
    s.trials = static_cast<int>(trials.size());
    s.scans.resize(static_cast<std::size_t>(sc.duration));
    for (int k = 0; k < sc.duration; ++k) s.scans[static_cast<std::size_t>(k)].scan = k + 1;
    std::vector<double> sq(s.scans.size(), 0.0);
    double time_sum = 0.0;
    std::size_t time_n = 0;
    for (const auto& t : trials) {
        if (t.failed) {
            s.failed_trials.emplace_back(t.trial, t.error);
            continue;
        }
        for (const auto& r : t.records) {
            auto& a = s.scans[static_cast<std::size_t>(r.scan - 1)];
            const double n = static_cast<double>(r.estimated_cardinality);
            a.samples += 1;
            a.true_cardinality = static_cast<double>(r.true_cardinality);
            a.mean_cardinality += n;
            sq[static_cast<std::size_t>(r.scan - 1)] += n * n;
            a.mean_ospa += r.ospa.total;
            a.mean_ospa_localization += r.ospa.localization;
            a.mean_ospa_cardinality += r.ospa.cardinality;
            a.mean_components += static_cast<double>(r.components);
            a.mean_step_time += r.step_time;
            time_sum += r.step_time;
            ++time_n;
        }
    }
    for (std::size_t i = 0; i < s.scans.size(); ++i) {
        auto& a = s.scans[i];
        if (a.samples == 0) continue;
        const double n = static_cast<double>(a.samples);
        a.mean_cardinality /= n;
        a.std_cardinality = std::sqrt(std::max(0.0, sq[i] / n - a.mean_cardinality * a.mean_cardinality));
        a.mean_ospa /= n;
        a.mean_ospa_localization /= n;
        a.mean_ospa_cardinality /= n;
        a.mean_components /= n;
        a.mean_step_time /= n;
    }
    s.mean_step_time = time_n ? time_sum / static_cast<double>(time_n) : 0.0;
    return s;
}

/// Runs `trials` Monte Carlo trials on up to `parallel` threads. Results are
/// collected by trial id, so the thread count never changes the output.
inline ExperimentResult run_experiment(const Scenario& sc, const ExperimentConfig& cfg, int trials, unsigned parallel = 1) {
    sc.validate();
    cfg.filter.validate();
    if (trials < 1) throw Error("trials must be >= 1");
    const Truth truth = generate_truth(sc);
    ExperimentResult res;
    res.trials.resize(static_cast<std::size_t>(trials));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < trials; t = next++) res.trials[static_cast<std::size_t>(t)] = run_trial(sc, truth, cfg, t);
    };
    const unsigned n = std::max(1u, std::min(parallel, static_cast<unsigned>(trials)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    }
    res.summary = summarize(sc, cfg, res.trials);
    return res;
}

inline void write_records_csv(std::ostream& os, const std::vector<TrialResult>& trials) {
    os << "trial,scan,true_cardinality,estimated_cardinality,ospa,ospa_localization,ospa_cardinality,components\n";
    char buf[256];
    for (const auto& t : trials)
        for (const auto& r : t.records) {
            std::snprintf(buf, sizeof buf, "%d,%d,%zu,%zu,%.9g,%.9g,%.9g,%zu\n", r.trial, r.scan, r.true_cardinality,
                          r.estimated_cardinality, r.ospa.total, r.ospa.localization, r.ospa.cardinality, r.components);
            os << buf;
        }
}

inline void write_timings_csv(std::ostream& os, const std::vector<TrialResult>& trials) {
    os << "trial,scan,step_time\n";
    char buf[128];
    for (const auto& t : trials)
        for (const auto& r : t.records) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.9g\n", r.trial, r.scan, r.step_time);
            os << buf;
        }
}

inline Json summary_to_json(const Summary& s) {
    Json j;
    j["scenario"] = s.scenario;
    j["scenario_hash"] = s.scenario_hash;
    j["backend"] = s.backend;
    j["max_hypotheses"] = s.max_hypotheses;
    j["trials"] = s.trials;
    j["failed_trials"] = Json::array();
    for (const auto& [t, e] : s.failed_trials) j["failed_trials"].push_back({{"trial", t}, {"error", e}});
    j["mean_step_time"] = s.mean_step_time;
    j["scans"] = Json::array();
    for (const auto& a : s.scans)
        j["scans"].push_back({{"scan", a.scan},
                              {"samples", a.samples},
                              {"true_cardinality", a.true_cardinality},
                              {"mean_cardinality", a.mean_cardinality},
                              {"std_cardinality", a.std_cardinality},
                              {"mean_ospa", a.mean_ospa},
                              {"mean_ospa_localization", a.mean_ospa_localization},
                              {"mean_ospa_cardinality", a.mean_ospa_cardinality},
                              {"mean_components", a.mean_components},
                              {"mean_step_time", a.mean_step_time}});
    return j;
}

inline Summary summary_from_json(const Json& j) {
    try {
        Summary s;
        s.scenario = j.value("scenario", std::string{});
        s.scenario_hash = j.at("scenario_hash").get<std::string>();
        s.backend = j.value("backend", std::string{});
        s.max_hypotheses = j.value("max_hypotheses", std::size_t{0});
        s.trials = j.value("trials", 0);
        if (j.contains("failed_trials"))
            for (const auto& f : j.at("failed_trials"))
                s.failed_trials.emplace_back(f.at("trial").get<int>(), f.at("error").get<std::string>());
        s.mean_step_time = j.at("mean_step_time").get<double>();
        for (const auto& a : j.at("scans")) {
            ScanSummary x;
            x.scan = a.at("scan").get<int>();
            x.samples = a.value("samples", std::size_t{0});
            x.true_cardinality = a.value("true_cardinality", 0.0);
            x.mean_cardinality = a.value("mean_cardinality", 0.0);
            x.std_cardinality = a.value("std_cardinality", 0.0);
            x.mean_ospa = a.at("mean_ospa").get<double>();
            x.mean_ospa_localization = a.value("mean_ospa_localization", 0.0);
            x.mean_ospa_cardinality = a.value("mean_ospa_cardinality", 0.0);
            x.mean_components = a.value("mean_components", 0.0);
            x.mean_step_time = a.value("mean_step_time", 0.0);
            s.scans.push_back(x);
        }
        return s;
    } catch (const Json::exception& e) {
        throw Error(std::string("summary: ") + e.what());
    }
}

/// Writes records.csv, timings.csv and summary.json into `dir`.
inline void write_outputs(const std::filesystem::path& dir, const ExperimentResult& res) {
    std::filesystem::create_directories(dir);
    std::ofstream rec(dir / "records.csv", std::ios::binary);
    write_records_csv(rec, res.trials);
    std::ofstream tim(dir / "timings.csv", std::ios::binary);
    write_timings_csv(tim, res.trials);
    std::ofstream sum(dir / "summary.json", std::ios::binary);
    sum << summary_to_json(res.summary).dump(2) << '\n';
    if (!rec || !tim || !sum) throw Error("failed writing outputs to " + dir.string());
}

struct Comparison {
    std::vector<int> scans;
    /// OSPA of B minus OSPA of A, per scan.
    std::vector<double> ospa_delta;
    /// Mean step time of A over mean step time of B.
    double runtime_ratio = 1.0;
    std::string runtime_ratio_text;
};

inline std::string two_significant(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2g", x);
    return buf;
}

inline Comparison compare_backends(const Summary& a, const Summary& b) {
    if (a.scenario_hash != b.scenario_hash) throw Error("scenario mismatch: " + a.scenario_hash + " vs " + b.scenario_hash);
    if (a.scans.size() != b.scans.size()) throw Error("summaries cover different scan counts");
    Comparison c;
    for (std::size_t i = 0; i < a.scans.size(); ++i) {
        c.scans.push_back(a.scans[i].scan);
        c.ospa_delta.push_back(b.scans[i].mean_ospa - a.scans[i].mean_ospa);
    }
    if (a.mean_step_time == b.mean_step_time)
        c.runtime_ratio = 1.0;
    else if (b.mean_step_time > 0.0)
        c.runtime_ratio = a.mean_step_time / b.mean_step_time;
    else
        c.runtime_ratio = std::numeric_limits<double>::infinity();
    c.runtime_ratio_text = two_significant(c.runtime_ratio);
    return c;
}

inline Json comparison_to_json(const Comparison& c) {
    Json j;
    j["runtime_ratio"] = c.runtime_ratio_text;
    j["scans"] = Json::array();
    for (std::size_t i = 0; i < c.scans.size(); ++i) j["scans"].push_back({{"scan", c.scans[i]}, {"ospa_delta", c.ospa_delta[i]}});
    return j;
}

}  // namespace glmb
