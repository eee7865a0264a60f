#pragma once

#include "glmb/assignment.hpp"
#include "glmb/error.hpp"
#include "glmb/gaussian.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace glmb {

struct OspaParams {
    double cutoff = 100.0;  ///< c, metres
    double order = 1.0;     ///< p

    void validate() const {
        if (!(cutoff > 0.0)) throw Error("OSPA cutoff must be positive");
        if (!(order >= 1.0)) throw Error("OSPA order must be >= 1");
    }
};

struct OspaResult {
    double total = 0.0;
    double localization = 0.0;
    double cardinality = 0.0;
};

/// Optimal sub-pattern assignment distance between two finite point sets,
/// with its localization and cardinality components.
template <int D>
OspaResult ospa(std::span<const Vec<D>> X, std::span<const Vec<D>> Y, const OspaParams& params) {
    params.validate();
    if (X.size() > Y.size()) std::swap(X, Y);
    const std::size_t m = X.size();
    const std::size_t n = Y.size();
    OspaResult r;
    if (n == 0) return r;
    const double c = params.cutoff;
    const double p = params.order;
    double loc_sum = 0.0;
    if (m > 0) {
        CostMatrix C(static_cast<int>(m), static_cast<int>(n), 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                C(static_cast<int>(i), static_cast<int>(j)) = std::pow(std::min((X[i] - Y[j]).norm(), c), p);
        const auto sol = solve_jv(C);
        if (!sol) throw Error("OSPA assignment failed");
        loc_sum = sol->cost;
    }
    const double card_sum = std::pow(c, p) * static_cast<double>(n - m);
    const double nn = static_cast<double>(n);
    r.total = std::pow((loc_sum + card_sum) / nn, 1.0 / p);
    r.localization = std::pow(loc_sum / nn, 1.0 / p);
    r.cardinality = std::pow(card_sum / nn, 1.0 / p);
    return r;
}

template <int D>
OspaResult ospa(const std::vector<Vec<D>>& X, const std::vector<Vec<D>>& Y, const OspaParams& params) {
    return ospa<D>(std::span<const Vec<D>>(X), std::span<const Vec<D>>(Y), params);
}

}  // namespace glmb
