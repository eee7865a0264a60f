#pragma once

// Brute-force two-stage recursion: enumerate survivor subsets and birth
// subsets for the prediction, then every association of the predicted label
// set for the update. Kalman arithmetic is written out independently of the
// library (explicit inverse, no Joseph form).

#include "glmb/density.hpp"
#include "glmb/filter.hpp"
#include "glmb/rng.hpp"
#include "glmb/motion_model.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <vector>

namespace glmb::testing {

struct OracleChild {
    std::size_t parent = 0;
    std::vector<AssocValue> assoc;  // extended form: survivors then births
    double weight = 0.0;            // normalized over the whole posterior
    std::map<Label, Vec<4>> means;
    std::map<Label, Mat<4, 4>> covs;
};

inline double oracle_gaussian(const Vec<2>& z, const Vec<2>& mu, const Mat<2, 2>& S) {
    const Vec<2> d = z - mu;
    return std::exp(-0.5 * d.dot(S.inverse() * d)) / (2.0 * std::numbers::pi * std::sqrt(S.determinant()));
}

/// Two-stage posterior of `prior` given `zs`. Births are labeled (scan, index).
inline std::vector<OracleChild> two_stage_posterior(const GlmbDensity<4>& prior, const std::vector<Vec<2>>& zs,
                                                    const PlanarModel& model, const BirthModel<4>& birth, int scan) {
    const int M = static_cast<int>(zs.size());
    std::vector<OracleChild> out;
    double total = 0.0;
    for (std::size_t h = 0; h < prior.components.size(); ++h) {
        const auto& comp = prior.components[h];
        const int N = static_cast<int>(comp.tracks.size());
        const int B = static_cast<int>(birth.terms.size());
        const int P = N + B;

        // Predicted densities for every track that could exist.
        std::vector<Label> labels;
        std::vector<Vec<4>> pm;
        std::vector<Mat<4, 4>> pc;
        for (const auto& t : comp.tracks) {
            labels.push_back(t.label);
            pm.push_back(model.F * t.density->mean);
            pc.push_back(model.F * t.density->covariance * model.F.transpose() + model.Q);
        }
        for (const auto& b : birth.terms) {
            labels.push_back(Label{scan, b.birth_index});
            pm.push_back(b.density.mean);
            pc.push_back(b.density.covariance);
        }

        for (int mask = 0; mask < (1 << P); ++mask) {
            // Prediction weight of survivor set L and birth set J.
            double w_pred = comp.weight();
            for (int n = 0; n < P; ++n) {
                const bool in = mask & (1 << n);
                const double p = n < N ? model.p_survival : birth.terms[static_cast<std::size_t>(n - N)].existence;
                w_pred *= in ? p : 1.0 - p;
            }
            if (w_pred == 0.0) continue;
            std::vector<int> members;
            for (int n = 0; n < P; ++n)
                if (mask & (1 << n)) members.push_back(n);

            // Every injective-on-measurements map of the predicted label set.
            std::vector<int> theta(members.size(), 0);
            while (true) {
                bool valid = true;
                for (std::size_t a = 0; a < theta.size() && valid; ++a)
                    for (std::size_t b = a + 1; b < theta.size(); ++b)
                        if (theta[a] > 0 && theta[a] == theta[b]) valid = false;
                if (valid) {
                    OracleChild child;
                    child.parent = h;
                    child.assoc.assign(static_cast<std::size_t>(P), M + 1);
                    double w = w_pred;
                    for (std::size_t i = 0; i < members.size(); ++i) {
                        const int n = members[i];
                        const int j = theta[i];
                        child.assoc[static_cast<std::size_t>(n)] = j;
                        const auto& m = pm[static_cast<std::size_t>(n)];
                        const auto& C = pc[static_cast<std::size_t>(n)];
                        if (j == 0) {
                            w *= 1.0 - model.p_detection;
                            child.means[labels[static_cast<std::size_t>(n)]] = m;
                            child.covs[labels[static_cast<std::size_t>(n)]] = C;
                        } else {
                            const Mat<2, 2> S = model.H * C * model.H.transpose() + model.R;
                            const Vec<2>& z = zs[static_cast<std::size_t>(j - 1)];
                            w *= model.p_detection * oracle_gaussian(z, model.H * m, S) / model.clutter_intensity;
                            const Mat<4, 2> K = C * model.H.transpose() * S.inverse();
                            child.means[labels[static_cast<std::size_t>(n)]] = m + K * (z - model.H * m);
                            child.covs[labels[static_cast<std::size_t>(n)]] = (Mat<4, 4>::Identity() - K * model.H) * C;
                        }
                    }
                    if (w > 0.0) {
                        child.weight = w;
                        total += w;
                        out.push_back(std::move(child));
                    }
                }
                std::size_t i = 0;
                while (i < theta.size() && ++theta[i] > M) theta[i++] = 0;
                if (i == theta.size()) break;
            }
        }
    }
    for (auto& c : out) c.weight /= total;
    return out;
}

struct FilterInstance {
    GlmbDensity<4> prior;
    std::vector<Vec<2>> zs;
    PlanarModel model;
    BirthModel<4> birth;
};

/// Small random joint-step problem: one to three prior hypotheses over a
/// pool of labels, at most `max_p` tracks per hypothesis including births,
/// and at most `max_m` measurements near the tracks.
inline FilterInstance random_filter_instance(Rng& rng, int max_p, int max_m) {
    FilterInstance in;
    in.model = constant_velocity_model(1.0, 2.0 + 3.0 * uniform01(rng), 5.0 + 10.0 * uniform01(rng),
                                       0.3 + 0.65 * uniform01(rng), 0.3 + 0.65 * uniform01(rng),
                                       1e-5 + 1e-3 * uniform01(rng));
    const int births = static_cast<int>(uniform01(rng) * std::min(3, max_p + 1));
    for (int b = 0; b < births; ++b) {
        BirthTerm<4> t;
        t.birth_index = b;
        t.existence = 0.02 + 0.5 * uniform01(rng);
        t.density.mean = Vec<4>(100.0 * uniform01(rng) - 50.0, 100.0 * uniform01(rng) - 50.0, 0.0, 0.0);
        t.density.covariance = Vec<4>(100.0, 100.0, 25.0, 25.0).asDiagonal();
        in.birth.terms.push_back(t);
    }
    const int pool = max_p - births;
    std::vector<std::shared_ptr<const GaussianDensity<4>>> dens;
    for (int i = 0; i < pool; ++i) {
        GaussianDensity<4> g;
        g.mean = Vec<4>(100.0 * uniform01(rng) - 50.0, 100.0 * uniform01(rng) - 50.0, 4.0 * uniform01(rng) - 2.0,
                        4.0 * uniform01(rng) - 2.0);
        g.covariance = Vec<4>(4.0 + 20.0 * uniform01(rng), 4.0 + 20.0 * uniform01(rng), 1.0, 1.0).asDiagonal();
        dens.push_back(std::make_shared<const GaussianDensity<4>>(g));
    }
    in.prior.scan_index = 4;
    const int H = 1 + static_cast<int>(uniform01(rng) * 3);
    for (int h = 0; h < H; ++h) {
        GlmbComponent<4> c;
        for (int i = 0; i < pool; ++i)
            if (uniform01(rng) < 0.6) c.tracks.push_back({Label{2, i}, dens[static_cast<std::size_t>(i)]});
        c.log_weight = std::log(0.05 + uniform01(rng));
        c.history = AssociationHistory{}.extended(ExtendedAssociation{{h}});
        in.prior.components.push_back(std::move(c));
    }
    in.prior = normalize(std::move(in.prior));
    const int M = static_cast<int>(uniform01(rng) * (max_m + 1));
    for (int j = 0; j < M; ++j) in.zs.emplace_back(120.0 * uniform01(rng) - 60.0, 120.0 * uniform01(rng) - 60.0);
    return in;
}

struct OracleMismatch {
    std::size_t library_components = 0;
    std::size_t oracle_components = 0;
    std::size_t unmatched = 0;
    double max_weight_rel_error = 0.0;
    double max_mean_error = 0.0;

    [[nodiscard]] bool ok(double weight_tol, double mean_tol) const {
        return library_components == oracle_components && unmatched == 0 && max_weight_rel_error <= weight_tol &&
               max_mean_error <= mean_tol;
    }
};

/// Runs an exhaustive joint step on `in` and compares every resulting
/// hypothesis with the two-stage enumeration.
inline OracleMismatch compare_joint_with_two_stage(const FilterInstance& in, Backend backend = Backend::ranked) {
    FilterConfig cfg;
    cfg.backend = backend;
    cfg.max_hypotheses = 100000000;
    cfg.min_weight = 0.0;
    const int scan = in.prior.scan_index + 1;
    const auto step =
        joint_step<4, 2>(in.prior, std::span<const Vec<2>>(in.zs), in.model, in.birth, cfg);
    const auto oracle = two_stage_posterior(in.prior, in.zs, in.model, in.birth, scan);
    OracleMismatch r;
    r.library_components = step.density.size();
    r.oracle_components = oracle.size();
    for (const auto& child : oracle) {
        const auto expected = in.prior.components[child.parent].history.extended(ExtendedAssociation{child.assoc});
        const GlmbComponent<4>* found = nullptr;
        for (const auto& c : step.density.components)
            if (c.history == expected) found = &c;
        if (!found) {
            ++r.unmatched;
            continue;
        }
        r.max_weight_rel_error = std::max(r.max_weight_rel_error, std::abs(found->weight() - child.weight) / child.weight);
        if (found->tracks.size() != child.means.size()) {
            ++r.unmatched;
            continue;
        }
        for (const auto& t : found->tracks) {
            auto it = child.means.find(t.label);
            if (it == child.means.end()) {
                ++r.unmatched;
                continue;
            }
            r.max_mean_error = std::max(r.max_mean_error, (t.density->mean - it->second).cwiseAbs().maxCoeff());
        }
    }
    return r;
}

}  // namespace glmb::testing
