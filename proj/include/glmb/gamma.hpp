#pragma once

#include "glmb/association.hpp"
#include "glmb/density.hpp"
#include "glmb/error.hpp"
#include "glmb/log_math.hpp"
#include "glmb/motion_model.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace glmb {

enum class TrackKind { surviving, birth };

/// log gamma^(j)(l) for association value j in 0..M+1. `existence` is
/// eta_S(l) for a surviving track and r(l) for a birth; `log_eta_z_row`
/// holds log eta_Z^(0..M)(l).
inline double log_gamma_value(TrackKind /*kind*/, int j, double existence, std::span<const double> log_eta_z_row) {
    const int M = static_cast<int>(log_eta_z_row.size()) - 1;
    if (j < 0 || j > M + 1) throw Error("association value out of range");
    if (j == M + 1) return safe_log(1.0 - existence);
    return safe_log(existence) + log_eta_z_row[static_cast<std::size_t>(j)];
}

/// Linear-domain gamma: 1 - eta_S, eta_S eta_Z, 1 - r, r eta_Z.
inline double gamma_value(TrackKind kind, int j, double existence, std::span<const double> eta_z_row) {
    const int M = static_cast<int>(eta_z_row.size()) - 1;
    if (j < 0 || j > M + 1) throw Error("association value out of range");
    (void)kind;
    if (j == M + 1) return 1.0 - existence;
    return existence * eta_z_row[static_cast<std::size_t>(j)];
}

/// All gamma values of one hypothesis: P tracks (N surviving, then births)
/// against M measurements. Only the M+2 meaningful values of each row are
/// stored (in log form); the P x (M+2P) layout is exposed through
/// `entry` / `log_entry`.
class GammaMatrix {
public:
    GammaMatrix() = default;
    GammaMatrix(std::vector<Label> track_labels, int num_surviving, int num_measurements)
        : labels_(std::move(track_labels)),
          survivors_(num_surviving),
          M_(num_measurements),
          log_values_(labels_.size() * static_cast<std::size_t>(num_measurements + 2), kNegInf) {
        if (num_surviving < 0 || num_surviving > static_cast<int>(labels_.size()))
            throw Error("surviving track count out of range");
    }

    [[nodiscard]] int rows() const { return static_cast<int>(labels_.size()); }
    [[nodiscard]] int measurements() const { return M_; }
    [[nodiscard]] int surviving() const { return survivors_; }
    [[nodiscard]] int columns() const { return M_ + 2 * rows(); }
    [[nodiscard]] const std::vector<Label>& track_labels() const { return labels_; }
    [[nodiscard]] TrackKind kind(int n) const { return n < survivors_ ? TrackKind::surviving : TrackKind::birth; }

    /// Row n as log gamma over association values 0..M+1.
    [[nodiscard]] std::span<const double> log_row(int n) const {
        return {log_values_.data() + static_cast<std::size_t>(n) * stride(), stride()};
    }
    [[nodiscard]] std::span<double> log_row(int n) {
        return {log_values_.data() + static_cast<std::size_t>(n) * stride(), stride()};
    }

    [[nodiscard]] double log_value(int n, int assoc) const { return log_row(n)[static_cast<std::size_t>(assoc)]; }
    [[nodiscard]] double value(int n, int assoc) const { return std::exp(log_value(n, assoc)); }

    /// Association value selected by column `col` in row `n`, or -1 for a
    /// structurally zero cell.
    [[nodiscard]] int column_to_assoc(int n, int col) const {
        if (col < M_) return col + 1;
        if (col == M_ + n) return 0;
        if (col == M_ + rows() + n) return M_ + 1;
        return -1;
    }

    [[nodiscard]] int assoc_to_column(int n, int assoc) const {
        if (assoc == 0) return M_ + n;
        if (assoc == M_ + 1) return M_ + rows() + n;
        return assoc - 1;
    }

    [[nodiscard]] double log_entry(int n, int col) const {
        const int a = column_to_assoc(n, col);
        return a < 0 ? kNegInf : log_value(n, a);
    }
    [[nodiscard]] double entry(int n, int col) const { return std::exp(log_entry(n, col)); }

private:
    [[nodiscard]] std::size_t stride() const { return static_cast<std::size_t>(M_ + 2); }

    std::vector<Label> labels_;
    int survivors_ = 0;
    int M_ = 0;
    std::vector<double> log_values_;
};

/// Dense P x (M+2P) cost matrix, C = -log(Gamma); forbidden cells are +inf.
struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    CostMatrix() = default;
    CostMatrix(int r, int c, double fill = kInf) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
};

inline CostMatrix cost_matrix(const GammaMatrix& gamma) {
    CostMatrix C(gamma.rows(), gamma.columns(), kInf);
    for (int n = 0; n < gamma.rows(); ++n) {
        const auto row = gamma.log_row(n);
        for (int a = 0; a <= gamma.measurements() + 1; ++a) {
            const double lg = row[static_cast<std::size_t>(a)];
            C(n, gamma.assoc_to_column(n, a)) = lg == kNegInf ? kInf : -lg;
        }
    }
    return C;
}

/// log w_prev + sum_n log Gamma(n, col(theta_n)); -inf when any selected
/// entry is zero.
inline double association_log_weight(double prior_log_weight, const ExtendedAssociation& assoc,
                                     const GammaMatrix& gamma) {
    if (static_cast<int>(assoc.size()) != gamma.rows()) throw Error("association length mismatch");
    double acc = prior_log_weight;
    for (int n = 0; n < gamma.rows(); ++n) {
        const double lg = gamma.log_value(n, assoc[static_cast<std::size_t>(n)]);
        if (lg == kNegInf) return kNegInf;
        acc += lg;
    }
    return acc;
}

template <int N>
double association_log_weight(const GlmbComponent<N>& component, const ExtendedAssociation& assoc,
                              const GammaMatrix& gamma) {
    return association_log_weight(component.log_weight, assoc, gamma);
}

/// Predicted single-track state for one scan together with its cached
/// innovation quantities and per-measurement log eta_Z.
template <int N, int Z>
struct PredictedTrack {
    Label label;
    TrackKind kind = TrackKind::surviving;
    double existence = 0.0;  ///< eta_S or r
    GaussianDensity<N> predicted;
    InnovationCache<N, Z> innovation;
    std::vector<double> log_eta_z;  ///< size M+1

    PredictedTrack(Label l, TrackKind k, double ex, const GaussianDensity<N>& pred, std::span<const Vec<Z>> zs,
                   const LinearGaussianModel<N, Z>& model, double gate_mahalanobis2 = 0.0)
        : label(l), kind(k), existence(ex), predicted(pred), innovation(pred, model) {
        const int M = static_cast<int>(zs.size());
        log_eta_z.resize(static_cast<std::size_t>(M) + 1);
        log_eta_z[0] = safe_log(1.0 - model.p_detection);
        const double log_pd = safe_log(model.p_detection);
        const double log_kappa = std::log(model.clutter_intensity);
        const double log_norm = innovation.log_likelihood(innovation_mean(model));
        for (int m = 0; m < M; ++m) {
            const double ll = innovation.log_likelihood(zs[static_cast<std::size_t>(m)]);
            const bool gated = gate_mahalanobis2 > 0.0 && 2.0 * (log_norm - ll) > gate_mahalanobis2;
            log_eta_z[static_cast<std::size_t>(m) + 1] = (gated || log_pd == kNegInf) ? kNegInf : log_pd + ll - log_kappa;
        }
    }

    void fill_gamma_row(std::span<double> row) const {
        const int M = static_cast<int>(log_eta_z.size()) - 1;
        for (int j = 0; j <= M + 1; ++j) row[static_cast<std::size_t>(j)] = log_gamma_value(kind, j, existence, log_eta_z);
    }

private:
    Vec<Z> innovation_mean(const LinearGaussianModel<N, Z>& model) const { return model.H * predicted.mean; }
};

/// Predicts every track of `component` (survivors by the motion model,
/// births from the birth model with labels (scan, birth_index)) and builds
/// its Gamma matrix.
template <int N, int Z>
GammaMatrix build_gamma(const GlmbComponent<N>& component, const BirthModel<N>& birth, int scan,
                        std::span<const Vec<Z>> measurements, const LinearGaussianModel<N, Z>& model) {
    std::vector<PredictedTrack<N, Z>> tracks;
    tracks.reserve(component.tracks.size() + birth.terms.size());
    for (const auto& t : component.tracks)
        tracks.emplace_back(t.label, TrackKind::surviving, eta_s(t.label, model), kalman_predict(*t.density, model),
                            measurements, model);
    for (const auto& b : birth.terms)
        tracks.emplace_back(Label{scan, b.birth_index}, TrackKind::birth, b.existence, b.density, measurements, model);

    std::vector<Label> labels;
    for (const auto& t : tracks) labels.push_back(t.label);
    GammaMatrix gamma(std::move(labels), static_cast<int>(component.tracks.size()),
                      static_cast<int>(measurements.size()));
    for (int n = 0; n < gamma.rows(); ++n) tracks[static_cast<std::size_t>(n)].fill_gamma_row(gamma.log_row(n));
    return gamma;
}

}  // namespace glmb
