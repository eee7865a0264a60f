#pragma once

#include "glmb/association.hpp"
#include "glmb/error.hpp"
#include "glmb/gaussian.hpp"
#include "glmb/label.hpp"
#include "glmb/log_math.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <unordered_map>
#include <vector>

namespace glmb {

/// One track of a hypothesis. Densities are immutable and shared between
/// hypotheses that carry the same track estimate.
template <int N>
struct TrackEntry {
    Label label;
    std::shared_ptr<const GaussianDensity<N>> density;
};

/// One delta-GLMB hypothesis (I, xi) with its weight and track densities.
/// The label set is the (sorted, duplicate-free) key set of `tracks`.
template <int N>
struct GlmbComponent {
    std::vector<TrackEntry<N>> tracks;
    AssociationHistory history;
    double log_weight = 0.0;

    [[nodiscard]] std::size_t cardinality() const { return tracks.size(); }
    [[nodiscard]] double weight() const { return std::exp(log_weight); }

    [[nodiscard]] std::vector<Label> labels() const {
        std::vector<Label> out;
        out.reserve(tracks.size());
        for (const auto& t : tracks) out.push_back(t.label);
        return out;
    }

    [[nodiscard]] const GaussianDensity<N>& density(const Label& l) const {
        auto it = std::lower_bound(tracks.begin(), tracks.end(), l,
                                   [](const TrackEntry<N>& t, const Label& x) { return t.label < x; });
        if (it == tracks.end() || it->label != l) throw Error("label not in component");
        return *it->density;
    }

    [[nodiscard]] std::uint64_t label_hash() const {
        std::uint64_t h = detail::mix64(tracks.size());
        for (const auto& t : tracks) h = detail::mix64(h ^ std::hash<Label>{}(t.label));
        return h;
    }

    /// Same hypothesis identity (label set and association history).
    [[nodiscard]] bool same_hypothesis(const GlmbComponent& o) const {
        if (tracks.size() != o.tracks.size()) return false;
        for (std::size_t i = 0; i < tracks.size(); ++i)
            if (tracks[i].label != o.tracks[i].label) return false;
        return history == o.history;
    }
};

/// A delta-GLMB density as an enumerated parameter set.
template <int N>
struct GlmbDensity {
    std::vector<GlmbComponent<N>> components;
    int scan_index = 0;

    [[nodiscard]] std::size_t size() const { return components.size(); }
    [[nodiscard]] bool empty() const { return components.empty(); }
};

/// Rescales weights to sum to one, working in the log domain. Components with
/// zero weight are dropped.
template <int N>
GlmbDensity<N> normalize(GlmbDensity<N> density) {
    std::vector<double> lw;
    lw.reserve(density.size());
    for (const auto& c : density.components) lw.push_back(c.log_weight);
    const double total = log_sum_exp(lw);
    if (total == kNegInf || std::isnan(total)) throw Error("degenerate density");
    std::erase_if(density.components, [](const GlmbComponent<N>& c) { return c.log_weight == kNegInf; });
    for (auto& c : density.components) c.log_weight -= total;
    return density;
}

/// rho(n) for n = 0..max cardinality.
template <int N>
std::vector<double> cardinality_distribution(const GlmbDensity<N>& density) {
    std::size_t n_max = 0;
    for (const auto& c : density.components) n_max = std::max(n_max, c.cardinality());
    std::vector<double> rho(n_max + 1, 0.0);
    for (const auto& c : density.components) rho[c.cardinality()] += c.weight();
    return rho;
}

template <int N>
struct TruncationResult {
    GlmbDensity<N> density;
    /// Sum of discarded weights, measured before renormalization.
    double l1_error = 0.0;
};

/// Keeps the `cap` highest-weight components whose weight is at least
/// `min_weight`, which minimizes the L1 distance to the input among all
/// subsets of that size. The top component is always kept.
template <int N>
TruncationResult<N> truncate(GlmbDensity<N> density, std::size_t cap, double min_weight = 0.0) {
    if (cap == 0) throw Error("truncation cap must be positive");
    auto& comps = density.components;
    std::vector<std::size_t> order(comps.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return comps[a].log_weight > comps[b].log_weight; });
    const double log_min = safe_log(min_weight);
    std::size_t keep = 0;
    while (keep < order.size() && keep < cap && (keep == 0 || comps[order[keep]].log_weight >= log_min)) ++keep;

    TruncationResult<N> out;
    out.density.scan_index = density.scan_index;
    out.density.components.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.density.components.push_back(std::move(comps[order[i]]));
    for (std::size_t i = keep; i < order.size(); ++i) out.l1_error += comps[order[i]].weight();
    if (!out.density.empty()) out.density = normalize(std::move(out.density));
    return out;
}

/// Merges components with identical (label set, history) by adding weights.
/// Output keeps first-occurrence order.
template <int N>
GlmbDensity<N> merge_duplicates(GlmbDensity<N> density) {
    GlmbDensity<N> out;
    out.scan_index = density.scan_index;
    out.components.reserve(density.size());
    std::unordered_multimap<std::uint64_t, std::size_t> seen;
    seen.reserve(density.size() * 2);
    for (auto& c : density.components) {
        const std::uint64_t key = detail::mix64(c.label_hash() ^ c.history.hash());
        bool merged = false;
        auto [lo, hi] = seen.equal_range(key);
        for (auto it = lo; it != hi; ++it) {
            auto& prev = out.components[it->second];
            if (prev.same_hypothesis(c)) {
                prev.log_weight = log_add_exp(prev.log_weight, c.log_weight);
                merged = true;
                break;
            }
        }
        if (!merged) {
            seen.emplace(key, out.components.size());
            out.components.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace glmb
