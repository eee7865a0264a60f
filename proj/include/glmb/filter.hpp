#pragma once

#include "glmb/assignment.hpp"
#include "glmb/density.hpp"
#include "glmb/error.hpp"
#include "glmb/gamma.hpp"
#include "glmb/gibbs.hpp"
#include "glmb/motion_model.hpp"
#include "glmb/murty.hpp"
#include "glmb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

namespace glmb {

enum class Backend { ranked, gibbs };

struct FilterConfig {
    Backend backend = Backend::ranked;
    /// H_max: hypotheses kept after each step, also the total association budget.
    std::size_t max_hypotheses = 1000;
    /// Normalized weight below which hypotheses are dropped.
    double min_weight = 1e-5;
    std::size_t gibbs_thinning = 1;
    GibbsInit gibbs_init = GibbsInit::all_misdetected;
    bool gibbs_restart = false;
    /// Squared Mahalanobis gate on measurement likelihoods; 0 disables gating.
    double gate_mahalanobis2 = 0.0;
    std::uint64_t seed = 0;
    /// Worker threads for the per-hypothesis loop. Output does not depend on it.
    unsigned threads = 1;

    void validate() const {
        if (max_hypotheses < 1) throw Error("max_hypotheses must be >= 1");
        if (gibbs_thinning < 1) throw Error("gibbs thinning must be >= 1");
        if (!(min_weight >= 0.0 && min_weight < 1.0)) throw Error("min_weight outside [0,1)");
    }
};

template <int N>
struct StateEstimate {
    int scan_index = 0;
    std::size_t cardinality = 0;
    std::vector<std::pair<Label, Vec<N>>> tracks;
};

template <int N>
struct StepResult {
    GlmbDensity<N> density;
    /// Normalized weight discarded by the final truncation.
    double truncation_error = 0.0;
    /// Distinct hypotheses before truncation.
    std::size_t generated = 0;
};

/// Per-hypothesis association budgets T(h) = max(1, ceil(H_max * w_h)), so
/// the budgets of a normalized prior sum to between H_max and H_max plus the
/// number of hypotheses.
template <int N>
std::vector<std::size_t> allocate_budgets(const GlmbDensity<N>& prior, std::size_t max_hypotheses) {
    std::vector<std::size_t> out;
    out.reserve(prior.size());
    for (const auto& c : prior.components) {
        // The slack keeps 100 * 0.01 from rounding up to 2.
        const double t = std::ceil(static_cast<double>(max_hypotheses) * c.weight() - 1e-9);
        out.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(t)));
    }
    return out;
}

namespace detail {

template <int N, int Z>
struct ScanTrack {
    PredictedTrack<N, Z> prediction;
    std::shared_ptr<const GaussianDensity<N>> predicted_ptr;
    std::vector<std::shared_ptr<const GaussianDensity<N>>> updated;  // by measurement, lazily
    std::vector<double> log_row;     // Gamma row over 0..M+1
    std::vector<double> scaled_row;  // Gibbs weights, empty unless needed
    double scaled_sum = 0.0;

    ScanTrack(PredictedTrack<N, Z> p, std::size_t M, bool gibbs)
        : prediction(std::move(p)),
          predicted_ptr(std::make_shared<const GaussianDensity<N>>(prediction.predicted)),
          updated(M),
          log_row(M + 2) {
        prediction.fill_gamma_row(log_row);
        if (gibbs) {
            scaled_row.resize(M + 2);
            GibbsSampler::scale_row(log_row, scaled_row);
            scaled_sum = GibbsSampler::row_sum(scaled_row);
        }
    }

    std::shared_ptr<const GaussianDensity<N>> posterior(int assoc, std::span<const Vec<Z>> zs) {
        if (assoc == 0) return predicted_ptr;
        auto& slot = updated[static_cast<std::size_t>(assoc - 1)];
        if (!slot)
            slot = std::make_shared<const GaussianDensity<N>>(
                prediction.innovation.updated(zs[static_cast<std::size_t>(assoc - 1)]));
        return slot;
    }
};

struct ChildAssociation {
    ExtendedAssociation association;
    double log_weight = 0.0;
};

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(count));
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    pool.clear();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// One joint prediction-update step. For each prior hypothesis the
/// surviving tracks are predicted, births attached, the Gamma matrix built
/// and the best (ranked) or sampled (Gibbs) extended associations turned
/// into posterior hypotheses; the result is merged, normalized and truncated.
template <int N, int Z>
StepResult<N> joint_step(const GlmbDensity<N>& prior, std::span<const Vec<Z>> measurements,
                         const LinearGaussianModel<N, Z>& model, const BirthModel<N>& birth,
                         const FilterConfig& config) {
    config.validate();
    if (prior.empty()) throw Error("empty prior density");
    const int scan = prior.scan_index + 1;
    const int M = static_cast<int>(measurements.size());
    const std::size_t Mz = measurements.size();
    const bool gibbs = config.backend == Backend::gibbs;

    // Predict each distinct track estimate once.
    std::vector<detail::ScanTrack<N, Z>> tracks;
    std::unordered_map<const GaussianDensity<N>*, std::size_t> track_index;
    std::vector<std::vector<std::size_t>> rows(prior.size());
    for (std::size_t h = 0; h < prior.size(); ++h) {
        for (const auto& t : prior.components[h].tracks) {
            auto [it, inserted] = track_index.try_emplace(t.density.get(), tracks.size());
            if (inserted)
                tracks.emplace_back(PredictedTrack<N, Z>(t.label, TrackKind::surviving, eta_s(t.label, model),
                                                         kalman_predict(*t.density, model), measurements, model,
                                                         config.gate_mahalanobis2),
                                    Mz, gibbs);
            rows[h].push_back(it->second);
        }
    }
    std::vector<std::size_t> birth_rows;
    for (const auto& b : birth.terms) {
        birth_rows.push_back(tracks.size());
        tracks.emplace_back(PredictedTrack<N, Z>(Label{scan, b.birth_index}, TrackKind::birth, b.existence, b.density,
                                                 measurements, model, config.gate_mahalanobis2),
                            Mz, gibbs);
    }

    const auto budgets = allocate_budgets(prior, config.max_hypotheses);
    std::vector<std::vector<detail::ChildAssociation>> children(prior.size());

    detail::parallel_for(prior.size(), config.threads, [&](std::size_t h) {
        const auto& comp = prior.components[h];
        std::vector<Label> labels;
        const std::size_t P = rows[h].size() + birth_rows.size();
        labels.reserve(P);
        for (std::size_t i : rows[h]) labels.push_back(tracks[i].prediction.label);
        for (std::size_t i : birth_rows) labels.push_back(tracks[i].prediction.label);
        GammaMatrix gamma(std::move(labels), static_cast<int>(rows[h].size()), M);
        int n = 0;
        for (std::size_t i : rows[h]) std::ranges::copy(tracks[i].log_row, gamma.log_row(n++).begin());
        for (std::size_t i : birth_rows) std::ranges::copy(tracks[i].log_row, gamma.log_row(n++).begin());

        std::vector<ExtendedAssociation> assocs;
        if (config.backend == Backend::ranked) {
            for (auto& r : murty_ranked(AssignmentProblem::from_gamma(gamma), budgets[h]))
                assocs.push_back(std::move(r.association));
        } else {
            GibbsConfig gc;
            gc.samples = budgets[h];
            gc.thinning = config.gibbs_thinning;
            gc.init = config.gibbs_init;
            gc.restart = config.gibbs_restart;
            gc.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(scan), h});
            std::vector<double> scaled;
            scaled.reserve(P * (Mz + 2));
            for (std::size_t i : rows[h]) scaled.insert(scaled.end(), tracks[i].scaled_row.begin(), tracks[i].scaled_row.end());
            for (std::size_t i : birth_rows) scaled.insert(scaled.end(), tracks[i].scaled_row.begin(), tracks[i].scaled_row.end());
            std::vector<double> sums;
            sums.reserve(P);
            for (std::size_t i : rows[h]) sums.push_back(tracks[i].scaled_sum);
            for (std::size_t i : birth_rows) sums.push_back(tracks[i].scaled_sum);
            GibbsSampler sampler(static_cast<int>(P), M, std::move(scaled), std::move(sums));
            assocs = gibbs_truncate(gamma, sampler, gc);
        }
        auto& out = children[h];
        out.reserve(assocs.size());
        for (auto& a : assocs) {
            const double lw = association_log_weight(comp.log_weight, a, gamma);
            if (lw != kNegInf) out.push_back({std::move(a), lw});
        }
    });

    GlmbDensity<N> posterior;
    posterior.scan_index = scan;
    for (std::size_t h = 0; h < prior.size(); ++h) {
        const auto& parent = prior.components[h];
        std::vector<std::size_t> row_tracks = rows[h];
        row_tracks.insert(row_tracks.end(), birth_rows.begin(), birth_rows.end());
        for (auto& child : children[h]) {
            GlmbComponent<N> c;
            c.log_weight = child.log_weight;
            c.tracks.reserve(row_tracks.size());
            for (std::size_t n = 0; n < row_tracks.size(); ++n) {
                const int a = child.association[n];
                if (a > M) continue;
                auto& st = tracks[row_tracks[n]];
                c.tracks.push_back({st.prediction.label, st.posterior(a, measurements)});
            }
            if (!std::is_sorted(c.tracks.begin(), c.tracks.end(),
                                [](const auto& x, const auto& y) { return x.label < y.label; }))
                std::sort(c.tracks.begin(), c.tracks.end(), [](const auto& x, const auto& y) { return x.label < y.label; });
            c.history = parent.history.extended(std::move(child.association));
            posterior.components.push_back(std::move(c));
        }
    }
    if (posterior.empty()) throw Error("empty posterior");

    posterior = normalize(merge_duplicates(std::move(posterior)));
    StepResult<N> result;
    result.generated = posterior.size();
    auto truncated = truncate(std::move(posterior), config.max_hypotheses, config.min_weight);
    result.density = std::move(truncated.density);
    result.truncation_error = truncated.l1_error;
    return result;
}

/// MAP-cardinality estimate: the most probable cardinality (lowest on ties),
/// then the heaviest hypothesis of that cardinality.
template <int N>
StateEstimate<N> extract_estimate(const GlmbDensity<N>& posterior) {
    StateEstimate<N> est;
    est.scan_index = posterior.scan_index;
    if (posterior.empty()) return est;
    const auto rho = cardinality_distribution(posterior);
    std::size_t n_star = 0;
    for (std::size_t n = 1; n < rho.size(); ++n)
        if (rho[n] > rho[n_star]) n_star = n;
    const GlmbComponent<N>* best = nullptr;
    for (const auto& c : posterior.components)
        if (c.cardinality() == n_star && (!best || c.log_weight > best->log_weight)) best = &c;
    est.cardinality = n_star;
    for (const auto& t : best->tracks) est.tracks.emplace_back(t.label, t.density->mean);
    return est;
}

/// Recursive filter state: the current posterior plus fixed model inputs.
template <int N, int Z>
class GlmbFilter {
public:
    GlmbFilter(LinearGaussianModel<N, Z> model, BirthModel<N> birth, FilterConfig config)
        : model_(std::move(model)), birth_(std::move(birth)), config_(config) {
        model_.validate();
        birth_.validate();
        config_.validate();
        density_.components.push_back(GlmbComponent<N>{});
    }

    const StepResult<N>& step(std::span<const Vec<Z>> measurements) {
        last_ = joint_step(density_, measurements, model_, birth_, config_);
        density_ = last_.density;
        return last_;
    }

    [[nodiscard]] const GlmbDensity<N>& density() const { return density_; }
    [[nodiscard]] StateEstimate<N> estimate() const { return extract_estimate(density_); }
    [[nodiscard]] const FilterConfig& config() const { return config_; }

private:
    LinearGaussianModel<N, Z> model_;
    BirthModel<N> birth_;
    FilterConfig config_;
    GlmbDensity<N> density_;
    StepResult<N> last_;
};

}  // namespace glmb
