#pragma once

#include "glmb/assignment.hpp"
#include "glmb/association.hpp"
#include "glmb/error.hpp"
#include "glmb/gamma.hpp"
#include "glmb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <unordered_set>
#include <vector>

namespace glmb {

enum class GibbsInit { all_misdetected, optimal_assignment, all_nonexistent };

struct GibbsConfig {
    std::size_t samples = 1;   ///< T
    std::size_t thinning = 1;  ///< B, sweeps per emitted sample
    GibbsInit init = GibbsInit::all_misdetected;
    /// Re-initialize the chain before every emitted sample instead of
    /// continuing it.
    bool restart = false;
    std::uint64_t seed = 0;

    void validate() const {
        if (samples < 1) throw Error("gibbs samples must be >= 1");
        if (thinning < 1) throw Error("gibbs thinning must be >= 1");
    }
};

/// Exact conditional pi(theta_n | rest) over values 0..M+1: proportional to
/// Gamma(n, value) except for measurements used by another track, which get
/// zero.
inline std::vector<double> conditional_marginal(int n, const ExtendedAssociation& assoc, const GammaMatrix& gamma) {
    const int M = gamma.measurements();
    const auto row = gamma.log_row(n);
    std::vector<std::uint8_t> taken(static_cast<std::size_t>(M) + 2, 0);
    for (int i = 0; i < gamma.rows(); ++i) {
        const int a = assoc[static_cast<std::size_t>(i)];
        if (i != n && a >= 1 && a <= M) taken[static_cast<std::size_t>(a)] = 1;
    }
    double hi = kNegInf;
    for (int j = 0; j <= M + 1; ++j)
        if (!taken[static_cast<std::size_t>(j)]) hi = std::max(hi, row[static_cast<std::size_t>(j)]);
    if (hi == kNegInf) throw Error("degenerate row");
    std::vector<double> p(static_cast<std::size_t>(M) + 2, 0.0);
    double total = 0.0;
    for (int j = 0; j <= M + 1; ++j) {
        if (taken[static_cast<std::size_t>(j)]) continue;
        p[static_cast<std::size_t>(j)] = std::exp(row[static_cast<std::size_t>(j)] - hi);
        total += p[static_cast<std::size_t>(j)];
    }
    for (double& x : p) x /= total;
    return p;
}

/// Gibbs chain over the extended associations of one hypothesis. Each row of
/// Gamma is pre-scaled by its maximum so draws need no exponentials. A draw
/// normalizes with the cached row sum minus the entries of measurements held
/// by other tracks, then scans the row (nonexistent and misdetected first).
class GibbsSampler {
public:
    explicit GibbsSampler(const GammaMatrix& gamma)
        : P_(gamma.rows()), M_(gamma.measurements()), stride_(static_cast<std::size_t>(M_) + 2),
          weights_(static_cast<std::size_t>(P_) * stride_), sums_(static_cast<std::size_t>(P_)), free_(stride_, 1) {
        for (int n = 0; n < P_; ++n) {
            const auto row = std::span<double>(weights_).subspan(static_cast<std::size_t>(n) * stride_, stride_);
            scale_row(gamma.log_row(n), row);
            sums_[static_cast<std::size_t>(n)] = row_sum(row);
        }
    }

    /// Rows already produced by `scale_row`, concatenated (P rows of M+2),
    /// with their `row_sum`s.
    GibbsSampler(int rows, int measurements, std::vector<double> scaled_rows, std::vector<double> row_sums)
        : P_(rows), M_(measurements), stride_(static_cast<std::size_t>(M_) + 2), weights_(std::move(scaled_rows)),
          sums_(std::move(row_sums)), free_(stride_, 1) {
        if (weights_.size() != static_cast<std::size_t>(P_) * stride_ || sums_.size() != static_cast<std::size_t>(P_))
            throw Error("scaled rows have the wrong size");
    }

    /// exp(log_row - max(log_row)); an all-zero row stays zero.
    static void scale_row(std::span<const double> log_row, std::span<double> out) {
        double hi = kNegInf;
        for (double x : log_row) hi = std::max(hi, x);
        for (std::size_t j = 0; j < log_row.size(); ++j) out[j] = hi == kNegInf ? 0.0 : std::exp(log_row[j] - hi);
    }

    static double row_sum(std::span<const double> row) {
        double total = 0.0;
        for (double x : row) total += x;
        return total;
    }

    /// Resamples entries 0..P-1 in order, each from its exact conditional.
    void sweep(std::vector<AssocValue>& s, Rng& rng) {
        bind(s);
        const std::size_t last = stride_ - 1;
        for (int n = 0; n < P_; ++n) {
            const int current = s[static_cast<std::size_t>(n)];
            if (current >= 1 && current <= M_) free_[static_cast<std::size_t>(current)] = 1;
            const double* w = &weights_[static_cast<std::size_t>(n) * stride_];
            const double full = sums_[static_cast<std::size_t>(n)];
            double total = full;
            for (int i = 0; i < P_; ++i) {
                const int a = s[static_cast<std::size_t>(i)];
                if (i != n && a >= 1 && a <= M_) total -= w[a];
            }
            // Most of the row mass sits on taken measurements: the difference
            // has lost too many digits, so sum the free entries directly.
            if (!(total > 1e-6 * full)) total = masked_sum(w);
            if (!(total > 0.0)) throw Error("degenerate row");
            const double u = uniform01(rng) * total;

            std::size_t pick = last;
            double acc = w[last];
            if (!(u < acc)) {
                pick = 0;
                acc += w[0];
                if (!(u < acc)) {
                    std::size_t fallback = w[0] > 0.0 ? 0 : last;
                    for (pick = 1; pick < last; ++pick) {
                        if (!free_[pick] || w[pick] == 0.0) continue;
                        fallback = pick;
                        acc += w[pick];
                        if (u < acc) break;
                    }
                    // Rounding can leave u beyond the last positive weight.
                    if (pick == last) pick = fallback;
                }
            }
            const int value = static_cast<int>(pick);
            s[static_cast<std::size_t>(n)] = value;
            if (value >= 1 && value <= M_) free_[pick] = 0;
        }
    }

    [[nodiscard]] int rows() const { return P_; }
    [[nodiscard]] int measurements() const { return M_; }

private:
    void bind(const std::vector<AssocValue>& s) {
        std::fill(free_.begin(), free_.end(), 1);
        for (int n = 0; n < P_; ++n) {
            const int a = s[static_cast<std::size_t>(n)];
            if (a >= 1 && a <= M_) free_[static_cast<std::size_t>(a)] = 0;
        }
    }

    double masked_sum(const double* w) const {
        double total = 0.0;
        for (std::size_t j = 0; j < stride_; ++j)
            if (free_[j]) total += w[j];
        return total;
    }

    int P_;
    int M_;
    std::size_t stride_;
    std::vector<double> weights_;
    std::vector<double> sums_;
    std::vector<std::uint8_t> free_;  // 0 where a measurement is taken
};

inline ExtendedAssociation gibbs_sweep(const ExtendedAssociation& assoc, const GammaMatrix& gamma, Rng& rng) {
    GibbsSampler sampler(gamma);
    ExtendedAssociation out = assoc;
    sampler.sweep(out.values, rng);
    return out;
}

inline ExtendedAssociation gibbs_initial_state(const GammaMatrix& gamma, GibbsInit init) {
    ExtendedAssociation a;
    switch (init) {
        case GibbsInit::all_misdetected:
            a.values.assign(static_cast<std::size_t>(gamma.rows()), 0);
            break;
        case GibbsInit::all_nonexistent:
            a.values.assign(static_cast<std::size_t>(gamma.rows()), gamma.measurements() + 1);
            break;
        case GibbsInit::optimal_assignment:
            a = gamma.rows() == 0 ? ExtendedAssociation{}
                                  : optimal_assignment(AssignmentProblem::from_gamma(gamma)).association;
            break;
    }
    return a;
}

/// Draws `samples` associations from the chain and returns the distinct
/// ones in first-seen order. With warm continuation the emitted states are
/// sweeps B, 2B, ..., TB; an optimal-assignment start is itself emitted as
/// the first sample (states 0, B, ..., (T-1)B).
inline std::vector<ExtendedAssociation> gibbs_truncate(const GammaMatrix& gamma, GibbsSampler& sampler,
                                                       const GibbsConfig& config) {
    config.validate();
    std::vector<ExtendedAssociation> out;
    if (gamma.rows() == 0) {
        out.emplace_back();
        return out;
    }
    if (sampler.rows() != gamma.rows() || sampler.measurements() != gamma.measurements())
        throw Error("sampler does not match gamma");
    Rng rng(config.seed);
    const ExtendedAssociation init = gibbs_initial_state(gamma, config.init);
    std::unordered_set<std::uint64_t> seen_hash;
    auto emit = [&](const std::vector<AssocValue>& s) {
        const std::uint64_t h = detail::hash_values(s);
        if (seen_hash.contains(h)) {
            for (const auto& prev : out)
                if (prev.values == s) return;
        }
        seen_hash.insert(h);
        out.push_back(ExtendedAssociation{s});
    };

    std::vector<AssocValue> state = init.values;
    std::size_t emitted = 0;
    if (!config.restart && config.init == GibbsInit::optimal_assignment) {
        emit(state);
        ++emitted;
    }
    for (; emitted < config.samples; ++emitted) {
        if (config.restart) state = init.values;
        for (std::size_t b = 0; b < config.thinning; ++b) sampler.sweep(state, rng);
        emit(state);
    }
    return out;
}

inline std::vector<ExtendedAssociation> gibbs_truncate(const GammaMatrix& gamma, const GibbsConfig& config) {
    GibbsSampler sampler(gamma);
    return gibbs_truncate(gamma, sampler, config);
}

}  // namespace glmb
