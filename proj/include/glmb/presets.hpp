#pragma once

// Built-in scenarios modelled on the standard crossing-targets benchmark:
// region [-1000,1000]^2 m, 100 scans of 1 s, sigma_v = 5 m/s^2, sigma_eps =
// 10 m, p_S = 0.99, p_D = 0.88, three labeled multi-Bernoulli birth terms
// with r = 0.04 and per-component standard deviation 10.
//
// Birth means are stationary points (0,100), (-100,-100), (100,-100): the
// benchmark's [0,0,100,0]-style vectors read in (x, vx, y, vy) order. Every
// truth track starts exactly on a birth mean with a speed below 18 m/s
// (under 2 sigma of the birth velocity spread).
//
// Geometry:
//   * three tracks born at scan 1 meet at the origin at scan 20;
//   * two pairs born at scans 20-25 meet at (+300,0) and (-300,0) at scan 40;
//   * three further births at scans 40, 50, 60.
// Birth/death scans are choices made here, not published ground truth.
// The truth is noise free, so crossing points are exact.

#include "glmb/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace glmb::presets {

inline BirthModel<4> benchmark_birth_model() {
    BirthModel<4> b;
    const State4 means[3] = {State4(0.0, 100.0, 0.0, 0.0), State4(-100.0, -100.0, 0.0, 0.0),
                             State4(100.0, -100.0, 0.0, 0.0)};
    for (int i = 0; i < 3; ++i) {
        BirthTerm<4> t;
        t.birth_index = i;
        t.existence = 0.04;
        t.density.mean = means[i];
        t.density.covariance = (Vec<4>::Constant(10.0).array().square()).matrix().asDiagonal();
        b.terms.push_back(t);
    }
    return b;
}

/// Track starting at `from` on scan `birth` that reaches `to` on scan `meet`.
inline TruthTrack converging(int birth, int death, double fx, double fy, double tx, double ty, int meet) {
    const double steps = static_cast<double>(meet - birth);
    return TruthTrack{birth, death, State4(fx, fy, (tx - fx) / steps, (ty - fy) / steps)};
}

inline std::vector<TruthTrack> crossing_tracks() {
    return {
        converging(1, 71, 0.0, 100.0, 0.0, 0.0, 20),
        converging(1, 101, -100.0, -100.0, 0.0, 0.0, 20),
        converging(1, 91, 100.0, -100.0, 0.0, 0.0, 20),
        converging(20, 101, 100.0, -100.0, 300.0, 0.0, 40),
        converging(20, 81, 0.0, 100.0, 300.0, 0.0, 40),
        converging(25, 86, -100.0, -100.0, -300.0, 0.0, 40),
        converging(22, 81, 0.0, 100.0, -300.0, 0.0, 40),
        TruthTrack{40, 101, State4(0.0, 100.0, 5.0, 8.0)},
        TruthTrack{50, 101, State4(100.0, -100.0, 8.0, -6.0)},
        TruthTrack{60, 101, State4(-100.0, -100.0, -6.0, -8.0)},
    };
}

inline Scenario benchmark(std::string name, double clutter_mean) {
    Scenario s;
    s.name = std::move(name);
    s.duration = 100;
    s.region = Region{-1000.0, 1000.0, -1000.0, 1000.0};
    s.dt = 1.0;
    s.sigma_v = 5.0;
    s.sigma_eps = 10.0;
    s.p_survival = 0.99;
    s.p_detection = 0.88;
    s.clutter_mean = clutter_mean;
    s.process_noise = false;
    s.birth = benchmark_birth_model();
    s.tracks = crossing_tracks();
    s.seed = 1;
    return s;
}

/// "paper-scenario-1": 66 false alarms per scan.
/// "paper-scenario-2": same geometry, 100 false alarms per scan.
inline std::optional<Scenario> find(const std::string& name) {
    if (name == "paper-scenario-1") return benchmark(name, 66.0);
    if (name == "paper-scenario-2") return benchmark(name, 100.0);
    return std::nullopt;
}

inline std::vector<std::string> names() { return {"paper-scenario-1", "paper-scenario-2"}; }

}  // namespace glmb::presets
