#pragma once

// JSON configuration files.
//
// Scenario file:
//   {
//     "preset": "paper-scenario-1",        optional; other keys override it
//     "name": "my-run",
//     "duration": 100,
//     "region": {"x": [-1000, 1000], "y": [-1000, 1000]},
//     "seed": 1,
//     "clutter_mean": 66,                   false alarms per scan
//     "process_noise": false,
//     "model": {"dt": 1, "sigma_v": 5, "sigma_eps": 10,
//               "p_survival": 0.99, "p_detection": 0.88},
//     "birth": [{"r": 0.04, "mean": [0, 100, 0, 0], "std": [10, 10, 10, 10]}, ...],
//                                           or "cov": 4x4 nested array instead of "std"
//     "tracks": [{"birth": 1, "death": 71, "state": [px, py, vx, vy]}, ...]
//   }
//
// Filter file:
//   {
//     "backend": "ranked" | "gibbs",
//     "max_hypotheses": 1000,
//     "min_weight": 1e-5,
//     "seed": 7,
//     "gate": 0,                            squared Mahalanobis gate, 0 = off
//     "threads": 1,
//     "gibbs": {"thinning": 1, "init": "all_misdetected", "restart": false},
//     "ospa": {"cutoff": 100, "order": 1}
//   }

#include "glmb/error.hpp"
#include "glmb/filter.hpp"
#include "glmb/ospa.hpp"
#include "glmb/presets.hpp"
#include "glmb/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace glmb {

using Json = nlohmann::json;

struct ExperimentConfig {
    FilterConfig filter;
    OspaParams ospa;
};

namespace detail {

template <int R>
Vec<R> vec_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(R))
        throw Error(std::string(what) + ": expected array of " + std::to_string(R) + " numbers");
    Vec<R> v;
    for (int i = 0; i < R; ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
    return v;
}

template <int R>
Mat<R, R> mat_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(R))
        throw Error(std::string(what) + ": expected " + std::to_string(R) + "x" + std::to_string(R) + " array");
    Mat<R, R> m;
    for (int r = 0; r < R; ++r) m.row(r) = vec_from_json<R>(j[static_cast<std::size_t>(r)], what).transpose();
    return m;
}

template <int R>
Json to_json(const Vec<R>& v) {
    Json j = Json::array();
    for (int i = 0; i < R; ++i) j.push_back(v[i]);
    return j;
}

inline GibbsInit gibbs_init_from_string(const std::string& s) {
    if (s == "all_misdetected") return GibbsInit::all_misdetected;
    if (s == "optimal_assignment") return GibbsInit::optimal_assignment;
    if (s == "all_nonexistent") return GibbsInit::all_nonexistent;
    throw Error("unknown gibbs init mode: " + s);
}

inline std::string to_string(GibbsInit g) {
    switch (g) {
        case GibbsInit::all_misdetected: return "all_misdetected";
        case GibbsInit::optimal_assignment: return "optimal_assignment";
        case GibbsInit::all_nonexistent: return "all_nonexistent";
    }
    return "?";
}

}  // namespace detail

inline Backend backend_from_string(const std::string& s) {
    if (s == "ranked") return Backend::ranked;
    if (s == "gibbs") return Backend::gibbs;
    throw Error("unknown backend: " + s);
}

inline std::string to_string(Backend b) { return b == Backend::ranked ? "ranked" : "gibbs"; }

inline Scenario scenario_from_json(const Json& j) {
    try {
        Scenario s;
        if (j.contains("preset")) {
            auto p = presets::find(j.at("preset").get<std::string>());
            if (!p) throw Error("unknown preset: " + j.at("preset").get<std::string>());
            s = *p;
        }
        s.name = j.value("name", s.name);
        s.duration = j.value("duration", s.duration);
        if (j.contains("region")) {
            const auto& r = j.at("region");
            s.region = Region{r.at("x").at(0).get<double>(), r.at("x").at(1).get<double>(),
                              r.at("y").at(0).get<double>(), r.at("y").at(1).get<double>()};
        }
        s.seed = j.value("seed", s.seed);
        s.clutter_mean = j.value("clutter_mean", s.clutter_mean);
        s.process_noise = j.value("process_noise", s.process_noise);
        if (j.contains("model")) {
            const auto& m = j.at("model");
            s.dt = m.value("dt", s.dt);
            s.sigma_v = m.value("sigma_v", s.sigma_v);
            s.sigma_eps = m.value("sigma_eps", s.sigma_eps);
            s.p_survival = m.value("p_survival", s.p_survival);
            s.p_detection = m.value("p_detection", s.p_detection);
        }
        if (j.contains("birth")) {
            s.birth.terms.clear();
            int idx = 0;
            for (const auto& b : j.at("birth")) {
                BirthTerm<4> t;
                t.birth_index = b.value("index", idx);
                t.existence = b.at("r").get<double>();
                t.density.mean = detail::vec_from_json<4>(b.at("mean"), "birth mean");
                if (b.contains("cov")) {
                    t.density.covariance = detail::mat_from_json<4>(b.at("cov"), "birth cov");
                } else {
                    const Vec<4> sd = detail::vec_from_json<4>(b.at("std"), "birth std");
                    t.density.covariance = sd.array().square().matrix().asDiagonal();
                }
                s.birth.terms.push_back(t);
                ++idx;
            }
        }
        if (j.contains("tracks")) {
            s.tracks.clear();
            for (const auto& t : j.at("tracks"))
                s.tracks.push_back(TruthTrack{t.at("birth").get<int>(), t.at("death").get<int>(),
                                              detail::vec_from_json<4>(t.at("state"), "track state")});
        }
        s.validate();
        return s;
    } catch (const Json::exception& e) {
        throw Error(std::string("scenario config: ") + e.what());
    }
}

inline Json scenario_to_json(const Scenario& s) {
    Json j;
    j["name"] = s.name;
    j["duration"] = s.duration;
    j["region"] = {{"x", {s.region.x_min, s.region.x_max}}, {"y", {s.region.y_min, s.region.y_max}}};
    j["seed"] = s.seed;
    j["clutter_mean"] = s.clutter_mean;
    j["process_noise"] = s.process_noise;
    j["model"] = {{"dt", s.dt},
                  {"sigma_v", s.sigma_v},
                  {"sigma_eps", s.sigma_eps},
                  {"p_survival", s.p_survival},
                  {"p_detection", s.p_detection}};
    j["birth"] = Json::array();
    for (const auto& b : s.birth.terms) {
        Json cov = Json::array();
        for (int r = 0; r < 4; ++r) cov.push_back(detail::to_json<4>(b.density.covariance.row(r).transpose()));
        j["birth"].push_back({{"index", b.birth_index}, {"r", b.existence}, {"mean", detail::to_json<4>(b.density.mean)}, {"cov", cov}});
    }
    j["tracks"] = Json::array();
    for (const auto& t : s.tracks)
        j["tracks"].push_back({{"birth", t.birth_scan}, {"death", t.death_scan}, {"state", detail::to_json<4>(t.initial_state)}});
    return j;
}

inline ExperimentConfig experiment_config_from_json(const Json& j) {
    try {
        ExperimentConfig c;
        auto& f = c.filter;
        if (j.contains("backend")) f.backend = backend_from_string(j.at("backend").get<std::string>());
        f.max_hypotheses = j.value("max_hypotheses", f.max_hypotheses);
        f.min_weight = j.value("min_weight", f.min_weight);
        f.seed = j.value("seed", f.seed);
        f.gate_mahalanobis2 = j.value("gate", f.gate_mahalanobis2);
        f.threads = j.value("threads", f.threads);
        if (j.contains("gibbs")) {
            const auto& g = j.at("gibbs");
            f.gibbs_thinning = g.value("thinning", f.gibbs_thinning);
            if (g.contains("init")) f.gibbs_init = detail::gibbs_init_from_string(g.at("init").get<std::string>());
            f.gibbs_restart = g.value("restart", f.gibbs_restart);
        }
        if (j.contains("ospa")) {
            c.ospa.cutoff = j.at("ospa").value("cutoff", c.ospa.cutoff);
            c.ospa.order = j.at("ospa").value("order", c.ospa.order);
        }
        f.validate();
        c.ospa.validate();
        return c;
    } catch (const Json::exception& e) {
        throw Error(std::string("filter config: ") + e.what());
    }
}

inline Json experiment_config_to_json(const ExperimentConfig& c) {
    const auto& f = c.filter;
    return Json{{"backend", to_string(f.backend)},
                {"max_hypotheses", f.max_hypotheses},
                {"min_weight", f.min_weight},
                {"seed", f.seed},
                {"gate", f.gate_mahalanobis2},
                {"threads", f.threads},
                {"gibbs", {{"thinning", f.gibbs_thinning}, {"init", detail::to_string(f.gibbs_init)}, {"restart", f.gibbs_restart}}},
                {"ospa", {{"cutoff", c.ospa.cutoff}, {"order", c.ospa.order}}}};
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

}  // namespace glmb
