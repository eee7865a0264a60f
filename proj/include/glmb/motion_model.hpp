#pragma once

#include "glmb/error.hpp"
#include "glmb/gaussian.hpp"
#include "glmb/label.hpp"
#include "glmb/log_math.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace glmb {

/// Linear-Gaussian single-target model with state-independent survival,
/// detection and clutter intensity.
template <int N, int Z>
struct LinearGaussianModel {
    Mat<N, N> F = Mat<N, N>::Identity();
    Mat<N, N> Q = Mat<N, N>::Zero();
    Mat<Z, N> H = Mat<Z, N>::Zero();
    Mat<Z, Z> R = Mat<Z, Z>::Identity();
    double p_survival = 0.99;
    double p_detection = 0.9;
    /// Clutter intensity kappa(z), per unit measurement volume.
    double clutter_intensity = 1.0;

    void validate() const {
        auto check_psd = [](const auto& m, const char* name) {
            const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
            if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
                throw Error(std::string(name) + " is not symmetric");
            using M = std::decay_t<decltype(m)>;
            Eigen::SelfAdjointEigenSolver<M> es(m, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -1e-9 * std::max(std::abs(m.trace()), 1e-300))
                throw Error(std::string(name) + " is not positive semidefinite");
        };
        check_psd(Q, "Q");
        check_psd(R, "R");
        if (!(p_survival >= 0.0 && p_survival <= 1.0)) throw Error("p_survival outside [0,1]");
        if (!(p_detection >= 0.0 && p_detection <= 1.0)) throw Error("p_detection outside [0,1]");
        if (!(clutter_intensity > 0.0)) throw Error("clutter intensity must be positive");
    }
};

using PlanarModel = LinearGaussianModel<4, 2>;

/// Nearly-constant-velocity planar model, state [px, py, vx, vy], position
/// measurements.
inline PlanarModel constant_velocity_model(double dt, double sigma_v, double sigma_eps, double p_survival,
                                           double p_detection, double clutter_intensity) {
    PlanarModel m;
    const Mat<2, 2> I2 = Mat<2, 2>::Identity();
    m.F.setIdentity();
    m.F.block<2, 2>(0, 2) = dt * I2;
    const double q = sigma_v * sigma_v;
    m.Q.block<2, 2>(0, 0) = q * std::pow(dt, 4) / 4.0 * I2;
    m.Q.block<2, 2>(0, 2) = q * std::pow(dt, 3) / 2.0 * I2;
    m.Q.block<2, 2>(2, 0) = q * std::pow(dt, 3) / 2.0 * I2;
    m.Q.block<2, 2>(2, 2) = q * dt * dt * I2;
    m.H.setZero();
    m.H.block<2, 2>(0, 0) = I2;
    m.R = sigma_eps * sigma_eps * I2;
    m.p_survival = p_survival;
    m.p_detection = p_detection;
    m.clutter_intensity = clutter_intensity;
    return m;
}

template <int N>
struct BirthTerm {
    int birth_index = 0;
    double existence = 0.0;  ///< r(l)
    GaussianDensity<N> density;
};

/// Labeled multi-Bernoulli birth model; term i yields label (k, birth_index) at scan k.
template <int N>
struct BirthModel {
    std::vector<BirthTerm<N>> terms;

    void validate() const {
        for (const auto& t : terms) {
            if (!(t.existence >= 0.0 && t.existence <= 1.0)) throw Error("birth existence outside [0,1]");
            if (!t.density.is_valid()) throw Error("invalid birth density");
        }
    }
};

template <int N, int Z>
GaussianDensity<N> kalman_predict(const GaussianDensity<N>& prior, const LinearGaussianModel<N, Z>& model) {
    GaussianDensity<N> out;
    out.mean = model.F * prior.mean;
    out.covariance = model.F * prior.covariance * model.F.transpose() + model.Q;
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
    return out;
}

/// Survival integral <p_S, p>; p_S is state independent so this is p_S.
template <int N, int Z>
double eta_s(const Label& /*label*/, const LinearGaussianModel<N, Z>& model) {
    return model.p_survival;
}

/// Measurement-update quantities that depend only on the predicted density:
/// innovation covariance factor, gain, and Joseph-form posterior covariance.
template <int N, int Z>
class InnovationCache {
public:
    InnovationCache(const GaussianDensity<N>& predicted, const LinearGaussianModel<N, Z>& model)
        : predicted_mean_(predicted.mean), H_(model.H) {
        const Mat<Z, Z> S = model.H * predicted.covariance * model.H.transpose() + model.R;
        llt_.compute(0.5 * (S + S.transpose()));
        if (llt_.info() != Eigen::Success) throw Error("singular innovation");
        const auto& L = llt_.matrixL();
        double log_det = 0.0;
        for (int i = 0; i < Z; ++i) {
            const double d = L(i, i);
            if (!(d > 0.0) || !std::isfinite(d)) throw Error("singular innovation");
            log_det += 2.0 * std::log(d);
        }
        log_norm_ = -0.5 * (Z * std::log(2.0 * std::numbers::pi) + log_det);
        predicted_z_ = model.H * predicted.mean;
        const Mat<N, Z> PHt = predicted.covariance * model.H.transpose();
        gain_ = llt_.solve(PHt.transpose()).transpose();
        const Mat<N, N> IKH = Mat<N, N>::Identity() - gain_ * model.H;
        posterior_cov_ = IKH * predicted.covariance * IKH.transpose() + gain_ * model.R * gain_.transpose();
        posterior_cov_ = 0.5 * (posterior_cov_ + posterior_cov_.transpose());
    }

    /// log N(z; H m, S)
    [[nodiscard]] double log_likelihood(const Vec<Z>& z) const {
        const Vec<Z> d = z - predicted_z_;
        const Vec<Z> w = llt_.matrixL().solve(d);
        return log_norm_ - 0.5 * w.squaredNorm();
    }

    [[nodiscard]] GaussianDensity<N> updated(const Vec<Z>& z) const {
        GaussianDensity<N> out;
        out.mean = predicted_mean_ + gain_ * (z - predicted_z_);
        out.covariance = posterior_cov_;
        return out;
    }

    [[nodiscard]] const Mat<N, N>& posterior_covariance() const { return posterior_cov_; }

private:
    Vec<N> predicted_mean_;
    Mat<Z, N> H_;
    Eigen::LLT<Mat<Z, Z>> llt_;
    double log_norm_ = 0.0;
    Vec<Z> predicted_z_;
    Mat<N, Z> gain_;
    Mat<N, N> posterior_cov_;
};

/// log eta_Z for association `assoc` in 0..M: log(1 - p_D) for a
/// misdetection, log(p_D N(z; Hm, S) / kappa) for measurement `assoc`.
template <int N, int Z>
double log_eta_z(const InnovationCache<N, Z>& cache, int assoc, std::span<const Vec<Z>> measurements,
                 const LinearGaussianModel<N, Z>& model) {
    if (assoc < 0 || assoc > static_cast<int>(measurements.size())) throw Error("association out of range");
    if (assoc == 0) return safe_log(1.0 - model.p_detection);
    if (model.p_detection <= 0.0) return kNegInf;
    return std::log(model.p_detection) + cache.log_likelihood(measurements[static_cast<std::size_t>(assoc - 1)]) -
           std::log(model.clutter_intensity);
}

template <int N, int Z>
double eta_z(const GaussianDensity<N>& predicted, int assoc, std::span<const Vec<Z>> measurements,
             const LinearGaussianModel<N, Z>& model) {
    if (assoc == 0) return 1.0 - model.p_detection;
    return std::exp(log_eta_z(InnovationCache<N, Z>(predicted, model), assoc, measurements, model));
}

/// Posterior track density for association `assoc` (0 leaves it unchanged).
template <int N, int Z>
GaussianDensity<N> kalman_update(const GaussianDensity<N>& predicted, int assoc, std::span<const Vec<Z>> measurements,
                                 const LinearGaussianModel<N, Z>& model) {
    if (assoc < 0 || assoc > static_cast<int>(measurements.size())) throw Error("association out of range");
    if (assoc == 0) return predicted;
    return InnovationCache<N, Z>(predicted, model).updated(measurements[static_cast<std::size_t>(assoc - 1)]);
}

}  // namespace glmb
