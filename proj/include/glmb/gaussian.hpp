#pragma once

#include "glmb/error.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace glmb {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

template <int R, int C>
using Mat = Eigen::Matrix<double, R, C>;

/// Gaussian kinematic density of one track: mean and covariance.
template <int N>
struct GaussianDensity {
    Vec<N> mean = Vec<N>::Zero();
    Mat<N, N> covariance = Mat<N, N>::Identity();

    /// Symmetric within 1e-9 relative and no eigenvalue below -1e-9 * trace.
    [[nodiscard]] bool is_valid() const {
        const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
        if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) return false;
        const Mat<N, N> sym = 0.5 * (covariance + covariance.transpose());
        Eigen::SelfAdjointEigenSolver<Mat<N, N>> es(sym, Eigen::EigenvaluesOnly);
        const double trace = std::max(0.0, sym.trace());
        return es.eigenvalues().minCoeff() >= -1e-9 * std::max(trace, 1e-300);
    }
};

/// Symmetric square root A of a PSD matrix (A A^T = cov). Works for
/// singular matrices such as the constant-velocity process noise.
template <int N>
Mat<N, N> psd_sqrt(const Mat<N, N>& cov) {
    Eigen::SelfAdjointEigenSolver<Mat<N, N>> es(0.5 * (cov + cov.transpose()));
    const Vec<N> root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace glmb
