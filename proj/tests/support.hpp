#pragma once

#include "glmb/density.hpp"
#include "glmb/gamma.hpp"
#include "glmb/rng.hpp"

#include <memory>
#include <random>
#include <vector>

namespace glmb::testing {

template <int N>
GlmbComponent<N> component(std::vector<Label> labels, double log_weight, double mean0 = 0.0) {
    GlmbComponent<N> c;
    c.log_weight = log_weight;
    for (const auto& l : labels) {
        GaussianDensity<N> g;
        g.mean = Vec<N>::Zero();
        g.mean[0] = mean0;
        g.covariance = Mat<N, N>::Identity();
        c.tracks.push_back({l, std::make_shared<const GaussianDensity<N>>(g)});
    }
    return c;
}

/// Random Gamma with P rows over M measurements. Entries are log-uniform
/// over a few decades, with an occasional hard zero on a measurement.
inline GammaMatrix random_gamma(Rng& rng, int P, int M, double zero_prob = 0.1) {
    std::vector<Label> labels;
    for (int n = 0; n < P; ++n) labels.push_back(Label{1, n});
    const int survivors = P / 2;
    GammaMatrix g(labels, survivors, M);
    for (int n = 0; n < P; ++n) {
        auto row = g.log_row(n);
        for (int j = 0; j <= M + 1; ++j) {
            const bool hard_zero = j >= 1 && j <= M && uniform01(rng) < zero_prob;
            row[static_cast<std::size_t>(j)] = hard_zero ? kNegInf : -6.0 * uniform01(rng);
        }
    }
    return g;
}

/// Every valid extended association for a P x M problem.
inline std::vector<ExtendedAssociation> all_associations(int P, int M) {
    std::vector<ExtendedAssociation> out;
    std::vector<AssocValue> v(static_cast<std::size_t>(P), 0);
    while (true) {
        ExtendedAssociation a{v};
        if (is_valid(a, M)) out.push_back(a);
        int i = 0;
        while (i < P && ++v[static_cast<std::size_t>(i)] > M + 1) v[static_cast<std::size_t>(i++)] = 0;
        if (i == P) break;
    }
    return out;
}

}  // namespace glmb::testing

namespace glmb::testing {

template <int N>
Mat<N, N> random_spd(Rng& rng, double scale = 1.0) {
    Mat<N, N> A;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) A(i, j) = 2.0 * uniform01(rng) - 1.0;
    Mat<N, N> S = scale * (A * A.transpose() + 0.1 * Mat<N, N>::Identity());
    return 0.5 * (S + S.transpose());
}

template <int N>
Vec<N> random_vec(Rng& rng, double scale = 1.0) {
    Vec<N> v;
    for (int i = 0; i < N; ++i) v[i] = scale * (2.0 * uniform01(rng) - 1.0);
    return v;
}

/// Draws from N(mean, cov).
template <int N>
struct GaussianSampler {
    Vec<N> mean;
    Mat<N, N> root;
    std::normal_distribution<double> normal;

    GaussianSampler(const Vec<N>& m, const Mat<N, N>& cov) : mean(m), root(psd_sqrt(cov)) {}

    Vec<N> operator()(Rng& rng) {
        Vec<N> w;
        for (int i = 0; i < N; ++i) w[i] = normal(rng);
        return mean + root * w;
    }
};

}  // namespace glmb::testing
