#pragma once

#include "glmb/error.hpp"
#include "glmb/label.hpp"
#include "glmb/motion_model.hpp"
#include "glmb/rng.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace glmb {

using State4 = Vec<4>;
using Meas2 = Vec<2>;

struct Region {
    double x_min = -1000.0;
    double x_max = 1000.0;
    double y_min = -1000.0;
    double y_max = 1000.0;

    [[nodiscard]] double area() const { return (x_max - x_min) * (y_max - y_min); }
    [[nodiscard]] bool contains(double x, double y) const { return x >= x_min && x <= x_max && y >= y_min && y <= y_max; }
};

/// Ground-truth track: present for scans birth_scan <= k < death_scan, clipped
/// to the scenario duration.
struct TruthTrack {
    int birth_scan = 1;
    int death_scan = 2;
    State4 initial_state = State4::Zero();
};

/// Planar tracking scenario. Scans are numbered 1..duration.
struct Scenario {
    std::string name = "custom";
    int duration = 100;
    Region region;
    double dt = 1.0;
    double sigma_v = 5.0;
    double sigma_eps = 10.0;
    double p_survival = 0.99;
    double p_detection = 0.88;
    /// Expected false alarms per scan; kappa = clutter_mean / region area.
    double clutter_mean = 66.0;
    bool process_noise = false;
    BirthModel<4> birth;
    std::vector<TruthTrack> tracks;
    std::uint64_t seed = 1;

    /// Filter/simulation model. Clutter intensity falls back to a tiny
    /// positive value when the scenario has no clutter.
    [[nodiscard]] PlanarModel model() const {
        const double kappa = clutter_mean > 0.0 ? clutter_mean / region.area() : 1e-12;
        return constant_velocity_model(dt, sigma_v, sigma_eps, p_survival, p_detection, kappa);
    }

    void validate() const {
        if (duration < 1) throw Error("scenario duration must be >= 1");
        if (!(region.area() > 0.0)) throw Error("empty surveillance region");
        if (clutter_mean < 0.0) throw Error("negative clutter mean");
        for (const auto& t : tracks) {
            if (!(t.birth_scan < t.death_scan)) throw Error("track birth scan must precede death scan");
            if (!region.contains(t.initial_state[0], t.initial_state[1])) throw Error("track starts outside region");
        }
        model().validate();
        birth.validate();
    }
};

struct TruthState {
    Label label;
    State4 state;
};

/// Truth per scan: element k-1 holds the states present at scan k.
using Truth = std::vector<std::vector<TruthState>>;

inline Truth generate_truth(const Scenario& sc) {
    const PlanarModel model = sc.model();
    Rng rng(derive_seed(sc.seed, {0x7275746855ULL}));
    std::normal_distribution<double> normal;
    const Mat<4, 4> q_root = psd_sqrt(model.Q);
    Truth truth(static_cast<std::size_t>(sc.duration));
    for (std::size_t i = 0; i < sc.tracks.size(); ++i) {
        const auto& t = sc.tracks[i];
        State4 x = t.initial_state;
        const Label label{t.birth_scan, static_cast<int>(i)};
        for (int k = t.birth_scan; k < t.death_scan && k <= sc.duration; ++k) {
            if (k > t.birth_scan) {
                x = model.F * x;
                if (sc.process_noise) {
                    State4 w;
                    for (int d = 0; d < 4; ++d) w[d] = normal(rng);
                    x += q_root * w;
                }
            }
            if (k >= 1) truth[static_cast<std::size_t>(k - 1)].push_back({label, x});
        }
    }
    return truth;
}

/// One scan of measurements. `origin` is a diagnostics side channel: the
/// index into the scan's truth list, or -1 for clutter.
struct ScanData {
    std::vector<Meas2> measurements;
    std::vector<int> origin;
};

inline ScanData generate_scan(const std::vector<TruthState>& truth, const PlanarModel& model, double clutter_mean,
                              const Region& region, Rng& rng) {
    std::normal_distribution<double> normal;
    const Mat<2, 2> r_root = psd_sqrt(model.R);
    std::vector<std::pair<Meas2, int>> items;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!(uniform01(rng) < model.p_detection)) continue;
        const Meas2 noise(normal(rng), normal(rng));
        items.emplace_back(model.H * truth[i].state + r_root * noise, static_cast<int>(i));
    }
    if (clutter_mean > 0.0) {
        std::poisson_distribution<int> poisson(clutter_mean);
        const int count = poisson(rng);
        for (int c = 0; c < count; ++c) {
            const double x = region.x_min + uniform01(rng) * (region.x_max - region.x_min);
            const double y = region.y_min + uniform01(rng) * (region.y_max - region.y_min);
            items.emplace_back(Meas2(x, y), -1);
        }
    }
    // Fisher-Yates with our own uniform draw keeps the order reproducible.
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
        std::swap(items[i - 1], items[std::min(j, i - 1)]);
    }
    ScanData out;
    for (auto& [z, o] : items) {
        out.measurements.push_back(z);
        out.origin.push_back(o);
    }
    return out;
}

/// All scans of one Monte Carlo trial, reproducible from (scenario seed, trial).
inline std::vector<ScanData> generate_scans(const Scenario& sc, const Truth& truth, std::uint64_t trial) {
    Rng rng(derive_seed(sc.seed, {0x7363616eULL, trial}));
    const PlanarModel model = sc.model();
    std::vector<ScanData> scans;
    scans.reserve(truth.size());
    for (const auto& at_k : truth) scans.push_back(generate_scan(at_k, model, sc.clutter_mean, sc.region, rng));
    return scans;
}

}  // namespace glmb
