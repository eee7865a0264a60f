#include "glmb/config.hpp"
#include "glmb/presets.hpp"
#include "glmb/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace glmb;

namespace {

Scenario straight_line() {
    Scenario sc;
    sc.duration = 10;
    sc.clutter_mean = 0.0;
    sc.p_detection = 1.0;
    sc.tracks.push_back(TruthTrack{1, 11, State4(0.0, 0.0, 100.0, 0.0)});
    return sc;
}

}  // namespace

TEST(Truth, ConstantVelocityPosition) {
    // Noise-free track at 100 m/s along x: scan 5 is four steps after birth.
    const auto truth = generate_truth(straight_line());
    ASSERT_EQ(truth[4].size(), 1u);
    EXPECT_NEAR(truth[4][0].state[0], 400.0, 1e-9);
    EXPECT_NEAR(truth[4][0].state[1], 0.0, 1e-9);
    auto sc = straight_line();
    sc.tracks[0].birth_scan = 0;
    const auto shifted = generate_truth(sc);
    EXPECT_NEAR(shifted[4][0].state[0], 500.0, 1e-9);
}

TEST(Truth, PresetCrossingAtOrigin) {
    const auto sc = *presets::find("paper-scenario-1");
    const auto truth = generate_truth(sc);
    int near_origin = 0;
    for (const auto& t : truth[19])
        if (t.state.head<2>().norm() < 1.0) ++near_origin;
    EXPECT_EQ(near_origin, 3);
}

TEST(Truth, BirthsAndDeaths) {
    const auto sc = *presets::find("paper-scenario-2");
    const auto truth = generate_truth(sc);
    ASSERT_EQ(truth.size(), 100u);
    for (std::size_t i = 0; i < sc.tracks.size(); ++i) {
        const auto& tt = sc.tracks[i];
        const Label label{tt.birth_scan, static_cast<int>(i)};
        for (int k = 1; k <= sc.duration; ++k) {
            bool present = false;
            for (const auto& s : truth[static_cast<std::size_t>(k - 1)]) present |= s.label == label;
            EXPECT_EQ(present, k >= tt.birth_scan && k < tt.death_scan) << "track " << i << " scan " << k;
        }
    }
}

TEST(Truth, StaysInsideRegion) {
    for (const auto& name : presets::names()) {
        const auto sc = *presets::find(name);
        for (const auto& at_k : generate_truth(sc))
            for (const auto& s : at_k) EXPECT_TRUE(sc.region.contains(s.state[0], s.state[1]));
    }
}

TEST(Truth, ProcessNoiseSpread) {
    // Two noisy steps from a fixed start: covariance F Q F^T + Q.
    auto sc = straight_line();
    sc.duration = 3;
    sc.process_noise = true;
    const auto model = sc.model();
    const Mat<4, 4> expected = model.F * model.Q * model.F.transpose() + model.Q;
    const int n = 20000;
    Vec<4> sum = Vec<4>::Zero();
    Mat<4, 4> sq = Mat<4, 4>::Zero();
    for (int i = 0; i < n; ++i) {
        sc.seed = static_cast<std::uint64_t>(i);
        const Vec<4> d = generate_truth(sc)[2][0].state - State4(200.0, 0.0, 100.0, 0.0);
        sum += d;
        sq += d * d.transpose();
    }
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(sum[i] / n, 0.0, 4.0 * std::sqrt(expected(i, i) / n));
        EXPECT_NEAR(sq(i, i) / n, expected(i, i), 0.05 * expected(i, i));
    }
}

TEST(Measurements, CertainDetectionWithoutClutter) {
    const auto sc = straight_line();
    const auto truth = generate_truth(sc);
    const auto scans = generate_scans(sc, truth, 0);
    for (const auto& s : scans) {
        ASSERT_EQ(s.measurements.size(), 1u);
        EXPECT_EQ(s.origin[0], 0);
    }
}

TEST(Measurements, ClutterCountMean) {
    for (double mean : {66.0, 100.0}) {
        const PlanarModel model = constant_velocity_model(1, 5, 10, 0.99, 0.88, 1.0);
        Rng rng(static_cast<std::uint64_t>(mean));
        const std::vector<TruthState> none;
        double total = 0.0;
        const int n = 10000;
        for (int i = 0; i < n; ++i) total += static_cast<double>(generate_scan(none, model, mean, Region{}, rng).measurements.size());
        EXPECT_NEAR(total / n, mean, 0.02 * mean);
    }
}

TEST(Measurements, DetectionRate) {
    const PlanarModel model = constant_velocity_model(1, 5, 10, 0.99, 0.88, 1.0);
    const std::vector<TruthState> truth{{Label{1, 0}, State4(0, 0, 0, 0)}, {Label{1, 1}, State4(10, 10, 0, 0)}};
    Rng rng(2);
    double detected = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) detected += static_cast<double>(generate_scan(truth, model, 0.0, Region{}, rng).measurements.size());
    EXPECT_NEAR(detected / (2.0 * n), 0.88, 0.01);
}

TEST(Measurements, ClutterUniformOverRegion) {
    // Chi-square test on a 10 x 10 grid; 99 degrees of freedom, 0.1% critical value 148.2.
    const PlanarModel model = constant_velocity_model(1, 5, 10, 0.99, 0.88, 1.0);
    const Region region{-1000, 1000, -500, 1500};
    Rng rng(3);
    std::vector<double> counts(100, 0.0);
    double n = 0.0;
    while (n < 100000) {
        for (const auto& z : generate_scan({}, model, 100.0, region, rng).measurements) {
            ASSERT_TRUE(region.contains(z[0], z[1]));
            const int cx = std::min(9, static_cast<int>((z[0] - region.x_min) / 200.0));
            const int cy = std::min(9, static_cast<int>((z[1] - region.y_min) / 200.0));
            counts[static_cast<std::size_t>(cx * 10 + cy)] += 1.0;
            n += 1.0;
        }
    }
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - n / 100.0) * (c - n / 100.0) / (n / 100.0);
    EXPECT_LT(chi2, 148.2);
}

TEST(Measurements, NoiseCovariance) {
    const PlanarModel model = constant_velocity_model(1, 5, 10, 0.99, 1.0, 1.0);
    const std::vector<TruthState> truth{{Label{1, 0}, State4(5, -5, 0, 0)}};
    Rng rng(4);
    const int n = 100000;
    double sx = 0, sy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        const auto z = generate_scan(truth, model, 0.0, Region{}, rng).measurements[0];
        sx += z[0] - 5;
        sy += z[1] + 5;
        sxx += (z[0] - 5) * (z[0] - 5);
        syy += (z[1] + 5) * (z[1] + 5);
    }
    EXPECT_NEAR(sx / n, 0.0, 3 * 10 / std::sqrt(n));
    EXPECT_NEAR(sy / n, 0.0, 3 * 10 / std::sqrt(n));
    EXPECT_NEAR(sxx / n, 100.0, 2.0);
    EXPECT_NEAR(syy / n, 100.0, 2.0);
}

TEST(Measurements, ReproducibleByTrial) {
    const auto sc = *presets::find("paper-scenario-1");
    const auto truth = generate_truth(sc);
    const auto a = generate_scans(sc, truth, 7);
    const auto b = generate_scans(sc, truth, 7);
    const auto c = generate_scans(sc, truth, 8);
    ASSERT_EQ(a.size(), b.size());
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ASSERT_EQ(a[k].measurements.size(), b[k].measurements.size());
        for (std::size_t j = 0; j < a[k].measurements.size(); ++j) EXPECT_EQ(a[k].measurements[j], b[k].measurements[j]);
        differs |= a[k].measurements.size() != c[k].measurements.size();
    }
    EXPECT_TRUE(differs);
}

TEST(ScenarioModel, ClutterIntensity) {
    const auto sc = *presets::find("paper-scenario-1");
    EXPECT_NEAR(sc.model().clutter_intensity, 66.0 / 4e6, 1e-18);
    EXPECT_EQ(sc.birth.terms.size(), 3u);
    EXPECT_EQ(sc.birth.terms[0].existence, 0.04);
}

TEST(ScenarioConfig, RoundTrip) {
    const auto sc = *presets::find("paper-scenario-2");
    const auto back = scenario_from_json(scenario_to_json(sc));
    EXPECT_EQ(scenario_to_json(back).dump(), scenario_to_json(sc).dump());
    EXPECT_EQ(back.clutter_mean, 100.0);
    EXPECT_EQ(back.tracks.size(), sc.tracks.size());
}

TEST(ScenarioConfig, PresetWithOverrides) {
    const auto sc = scenario_from_json(Json::parse(R"({"preset": "paper-scenario-1", "duration": 30, "seed": 9})"));
    EXPECT_EQ(sc.duration, 30);
    EXPECT_EQ(sc.seed, 9u);
    EXPECT_EQ(sc.clutter_mean, 66.0);
}

TEST(ScenarioConfig, InvalidRejected) {
    EXPECT_THROW(scenario_from_json(Json::parse(R"({"duration": 0})")), Error);
    EXPECT_THROW(scenario_from_json(Json::parse(R"({"clutter_mean": -1})")), Error);
    EXPECT_THROW(scenario_from_json(Json::parse(R"({"model": {"p_detection": 1.5}})")), Error);
    EXPECT_THROW(scenario_from_json(Json::parse(R"({"preset": "nope"})")), Error);
    EXPECT_THROW(scenario_from_json(Json::parse(R"({"duration": "long"})")), Error);
    EXPECT_THROW(scenario_from_json(Json::parse(R"({"tracks": [{"birth": 5, "death": 3, "state": [0,0,0,0]}]})")), Error);
}

TEST(ExperimentConfig, RoundTripAndValidation) {
    ExperimentConfig cfg;
    cfg.filter.backend = Backend::gibbs;
    cfg.filter.max_hypotheses = 321;
    cfg.filter.gibbs_thinning = 3;
    cfg.ospa.cutoff = 50.0;
    const auto back = experiment_config_from_json(experiment_config_to_json(cfg));
    EXPECT_EQ(back.filter.backend, Backend::gibbs);
    EXPECT_EQ(back.filter.max_hypotheses, 321u);
    EXPECT_EQ(back.filter.gibbs_thinning, 3u);
    EXPECT_EQ(back.ospa.cutoff, 50.0);
    EXPECT_THROW(experiment_config_from_json(Json::parse(R"({"backend": "magic"})")), Error);
    EXPECT_THROW(experiment_config_from_json(Json::parse(R"({"max_hypotheses": 0})")), Error);
    EXPECT_THROW(experiment_config_from_json(Json::parse(R"({"ospa": {"order": 0.5}})")), Error);
}
