#pragma once

#include "glmb/association.hpp"
#include "glmb/error.hpp"
#include "glmb/gamma.hpp"
#include "glmb/log_math.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace glmb {

/// Row-to-column assignment of a rectangular (rows <= cols) cost matrix.
struct Assignment {
    std::vector<int> col_for_row;
    double cost = 0.0;
};

inline double assignment_cost(const CostMatrix& C, const std::vector<int>& col_for_row) {
    double acc = 0.0;
    for (int r = 0; r < C.rows; ++r) acc += C(r, col_for_row[static_cast<std::size_t>(r)]);
    return acc;
}

namespace detail {

/// Shortest-augmenting-path (Jonker-Volgenant) state over a fixed cost
/// matrix. Supports a subset of rows being fixed (removed together with
/// their columns) and individual cells being banned, which is what Murty
/// partitioning needs. Duals satisfy u_r + v_c <= C(r,c) on allowed cells,
/// equality on assigned cells, v <= 0 and v = 0 on free columns.
class SapState {
public:
    std::vector<int> col4row;
    std::vector<double> u;
    std::vector<double> v;

    explicit SapState(const CostMatrix& C)
        : col4row(static_cast<std::size_t>(C.rows), -1), u(static_cast<std::size_t>(C.rows), 0.0),
          v(static_cast<std::size_t>(C.cols), 0.0) {}
};

class SapSolver {
public:
    explicit SapSolver(const CostMatrix& C)
        : C_(C),
          banned_(static_cast<std::size_t>(C.rows) * C.cols, 0),
          fixed_row_(static_cast<std::size_t>(C.rows), 0),
          blocked_col_(static_cast<std::size_t>(C.cols), 0),
          row4col_(static_cast<std::size_t>(C.cols), -1),
          dist_(static_cast<std::size_t>(C.cols)),
          path_(static_cast<std::size_t>(C.cols)),
          visited_(static_cast<std::size_t>(C.cols)) {
        if (C.rows > C.cols) throw Error("assignment needs rows <= columns");
    }

    /// Completes `state` to an optimal assignment under the given fixed rows
    /// and banned cells. Rows listed in `fixed` keep their current column.
    /// Returns false when no feasible completion exists.
    bool solve(SapState& s, const std::vector<std::uint8_t>& fixed, const std::vector<std::pair<int, int>>& bans) {
        const int R = C_.rows;
        const int K = C_.cols;
        for (const auto& [r, c] : bans) banned_[idx(r, c)] = 1;
        std::fill(blocked_col_.begin(), blocked_col_.end(), 0);
        std::fill(row4col_.begin(), row4col_.end(), -1);
        for (int r = 0; r < R; ++r) {
            fixed_row_[static_cast<std::size_t>(r)] = fixed[static_cast<std::size_t>(r)];
            const int c = s.col4row[static_cast<std::size_t>(r)];
            if (c >= 0) {
                row4col_[static_cast<std::size_t>(c)] = r;
                if (fixed[static_cast<std::size_t>(r)]) blocked_col_[static_cast<std::size_t>(c)] = 1;
            }
        }
        // Restore complementary slackness: free columns must carry v = 0.
        std::vector<int> pending;
        for (int c = 0; c < K; ++c)
            if (row4col_[static_cast<std::size_t>(c)] < 0 && s.v[static_cast<std::size_t>(c)] != 0.0) pending.push_back(c);
        while (!pending.empty()) {
            const int c = pending.back();
            pending.pop_back();
            s.v[static_cast<std::size_t>(c)] = 0.0;
            for (int r = 0; r < R; ++r) {
                const int rc = s.col4row[static_cast<std::size_t>(r)];
                if (rc < 0 || fixed_row_[static_cast<std::size_t>(r)] || banned_[idx(r, c)]) continue;
                const double cost = C_(r, c);
                if (cost == kInf) continue;
                const double reduced = cost - s.u[static_cast<std::size_t>(r)];
                if (reduced < -1e-12 * (1.0 + std::abs(cost))) {
                    s.col4row[static_cast<std::size_t>(r)] = -1;
                    row4col_[static_cast<std::size_t>(rc)] = -1;
                    pending.push_back(rc);
                }
            }
        }
        bool ok = true;
        for (int r = 0; r < R && ok; ++r)
            if (s.col4row[static_cast<std::size_t>(r)] < 0) ok = augment(s, r);
        for (const auto& [r, c] : bans) banned_[idx(r, c)] = 0;
        return ok;
    }

private:
    [[nodiscard]] std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * C_.cols + c; }

    bool augment(SapState& s, int start) {
        const int K = C_.cols;
        std::fill(dist_.begin(), dist_.end(), kInf);
        std::fill(visited_.begin(), visited_.end(), 0);
        scanned_rows_.clear();
        scanned_cols_.clear();
        int cur = start;
        double min_val = 0.0;
        int sink = -1;
        while (sink < 0) {
            const double* row = &C_.data[static_cast<std::size_t>(cur) * K];
            const double ucur = s.u[static_cast<std::size_t>(cur)];
            const std::uint8_t* ban = &banned_[idx(cur, 0)];
            for (int c = 0; c < K; ++c) {
                if (visited_[static_cast<std::size_t>(c)] || blocked_col_[static_cast<std::size_t>(c)] || ban[c]) continue;
                const double cost = row[c];
                if (cost == kInf) continue;
                const double d = min_val + cost - ucur - s.v[static_cast<std::size_t>(c)];
                if (d < dist_[static_cast<std::size_t>(c)]) {
                    dist_[static_cast<std::size_t>(c)] = d;
                    path_[static_cast<std::size_t>(c)] = cur;
                }
            }
            int best = -1;
            double best_d = kInf;
            bool best_free = false;
            for (int c = 0; c < K; ++c) {
                if (visited_[static_cast<std::size_t>(c)] || blocked_col_[static_cast<std::size_t>(c)]) continue;
                const double d = dist_[static_cast<std::size_t>(c)];
                const bool is_free = row4col_[static_cast<std::size_t>(c)] < 0;
                if (d < best_d || (d == best_d && is_free && !best_free)) {
                    best = c;
                    best_d = d;
                    best_free = is_free;
                }
            }
            if (best < 0 || best_d == kInf) return false;
            min_val = best_d;
            if (best_free) {
                sink = best;
            } else {
                visited_[static_cast<std::size_t>(best)] = 1;
                scanned_cols_.push_back(best);
                cur = row4col_[static_cast<std::size_t>(best)];
                scanned_rows_.push_back(cur);
            }
        }
        s.u[static_cast<std::size_t>(start)] += min_val;
        for (int r : scanned_rows_)
            s.u[static_cast<std::size_t>(r)] += min_val - dist_[static_cast<std::size_t>(s.col4row[static_cast<std::size_t>(r)])];
        for (int c : scanned_cols_) s.v[static_cast<std::size_t>(c)] -= min_val - dist_[static_cast<std::size_t>(c)];
        int c = sink;
        while (true) {
            const int r = path_[static_cast<std::size_t>(c)];
            row4col_[static_cast<std::size_t>(c)] = r;
            std::swap(c, s.col4row[static_cast<std::size_t>(r)]);
            if (r == start) break;
        }
        return true;
    }

    const CostMatrix& C_;
    std::vector<std::uint8_t> banned_;
    std::vector<std::uint8_t> fixed_row_;
    std::vector<std::uint8_t> blocked_col_;
    std::vector<int> row4col_;
    std::vector<double> dist_;
    std::vector<int> path_;
    std::vector<std::uint8_t> visited_;
    std::vector<int> scanned_rows_;
    std::vector<int> scanned_cols_;
};

}  // namespace detail

/// Minimum-cost assignment of every row to a distinct column via shortest
/// augmenting paths (Jonker-Volgenant). +inf cells are forbidden.
inline std::optional<Assignment> solve_jv(const CostMatrix& C) {
    if (C.rows == 0) return Assignment{};
    detail::SapSolver solver(C);
    detail::SapState state(C);
    if (!solver.solve(state, std::vector<std::uint8_t>(static_cast<std::size_t>(C.rows), 0), {})) return std::nullopt;
    Assignment out{state.col4row, 0.0};
    out.cost = assignment_cost(C, out.col_for_row);
    return out;
}

/// Classic Munkres (Hungarian) algorithm with starred/primed zeros. Kept as
/// an independent cross-check of `solve_jv`.
inline std::optional<Assignment> solve_munkres(const CostMatrix& C) {
    const int R = C.rows;
    const int K = C.cols;
    if (R > K) throw Error("assignment needs rows <= columns");
    if (R == 0) return Assignment{};
    double big = 1.0;
    for (double x : C.data)
        if (x != kInf) big = std::max(big, std::abs(x));
    big = big * (R + 1) * 4.0 + 1.0;
    std::vector<double> a(static_cast<std::size_t>(R) * K);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = C.data[i] == kInf ? big : C.data[i];
    auto at = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * K + c]; };

    for (int r = 0; r < R; ++r) {
        double mn = kInf;
        for (int c = 0; c < K; ++c) mn = std::min(mn, at(r, c));
        for (int c = 0; c < K; ++c) at(r, c) -= mn;
    }
    // mask: 1 = starred, 2 = primed
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(R) * K, 0);
    auto mk = [&](int r, int c) -> std::uint8_t& { return mask[static_cast<std::size_t>(r) * K + c]; };
    std::vector<std::uint8_t> row_cov(static_cast<std::size_t>(R), 0), col_cov(static_cast<std::size_t>(K), 0);
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < K; ++c)
            if (at(r, c) == 0.0 && !row_cov[static_cast<std::size_t>(r)] && !col_cov[static_cast<std::size_t>(c)]) {
                mk(r, c) = 1;
                row_cov[static_cast<std::size_t>(r)] = 1;
                col_cov[static_cast<std::size_t>(c)] = 1;
            }
    std::fill(row_cov.begin(), row_cov.end(), 0);
    std::fill(col_cov.begin(), col_cov.end(), 0);

    auto cover_starred_columns = [&] {
        int covered = 0;
        for (int c = 0; c < K; ++c) {
            col_cov[static_cast<std::size_t>(c)] = 0;
            for (int r = 0; r < R; ++r)
                if (mk(r, c) == 1) {
                    col_cov[static_cast<std::size_t>(c)] = 1;
                    ++covered;
                    break;
                }
        }
        return covered;
    };

    while (cover_starred_columns() < R) {
        while (true) {
            // find an uncovered zero
            int zr = -1, zc = -1;
            for (int r = 0; r < R && zr < 0; ++r) {
                if (row_cov[static_cast<std::size_t>(r)]) continue;
                for (int c = 0; c < K; ++c)
                    if (!col_cov[static_cast<std::size_t>(c)] && at(r, c) == 0.0) {
                        zr = r;
                        zc = c;
                        break;
                    }
            }
            if (zr < 0) {
                double mn = kInf;
                for (int r = 0; r < R; ++r)
                    if (!row_cov[static_cast<std::size_t>(r)])
                        for (int c = 0; c < K; ++c)
                            if (!col_cov[static_cast<std::size_t>(c)]) mn = std::min(mn, at(r, c));
                for (int r = 0; r < R; ++r)
                    for (int c = 0; c < K; ++c) {
                        if (row_cov[static_cast<std::size_t>(r)]) at(r, c) += mn;
                        if (!col_cov[static_cast<std::size_t>(c)]) at(r, c) -= mn;
                    }
                continue;
            }
            mk(zr, zc) = 2;
            int star_c = -1;
            for (int c = 0; c < K; ++c)
                if (mk(zr, c) == 1) star_c = c;
            if (star_c >= 0) {
                row_cov[static_cast<std::size_t>(zr)] = 1;
                col_cov[static_cast<std::size_t>(star_c)] = 0;
                continue;
            }
            // augmenting path of alternating primes and stars
            std::vector<std::pair<int, int>> path{{zr, zc}};
            while (true) {
                int sr = -1;
                for (int r = 0; r < R; ++r)
                    if (mk(r, path.back().second) == 1) sr = r;
                if (sr < 0) break;
                path.emplace_back(sr, path.back().second);
                int pc = -1;
                for (int c = 0; c < K; ++c)
                    if (mk(sr, c) == 2) pc = c;
                path.emplace_back(sr, pc);
            }
            for (const auto& [r, c] : path) mk(r, c) = mk(r, c) == 1 ? 0 : 1;
            for (auto& m : mask)
                if (m == 2) m = 0;
            std::fill(row_cov.begin(), row_cov.end(), 0);
            std::fill(col_cov.begin(), col_cov.end(), 0);
            break;
        }
    }
    Assignment out;
    out.col_for_row.assign(static_cast<std::size_t>(R), -1);
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < K; ++c)
            if (mk(r, c) == 1) out.col_for_row[static_cast<std::size_t>(r)] = c;
    for (int r = 0; r < R; ++r)
        if (C(r, out.col_for_row[static_cast<std::size_t>(r)]) == kInf) return std::nullopt;
    out.cost = assignment_cost(C, out.col_for_row);
    return out;
}

/// Cost matrix of one hypothesis plus the Gamma layout metadata needed to
/// read assignments back as extended associations.
struct AssignmentProblem {
    CostMatrix cost;
    int num_measurements = 0;

    AssignmentProblem() = default;
    AssignmentProblem(CostMatrix c, int measurements) : cost(std::move(c)), num_measurements(measurements) {
        if (cost.cols != num_measurements + 2 * cost.rows) throw Error("cost matrix is not P x (M+2P)");
        for (int r = 0; r < cost.rows; ++r) {
            bool any = false;
            for (int c = 0; c < cost.cols && !any; ++c) any = cost(r, c) != kInf;
            if (!any) throw Error("assignment row without a finite entry");
        }
    }

    static AssignmentProblem from_gamma(const GammaMatrix& gamma) {
        return AssignmentProblem(cost_matrix(gamma), gamma.measurements());
    }

    [[nodiscard]] int rows() const { return cost.rows; }

    [[nodiscard]] ExtendedAssociation to_association(const std::vector<int>& col_for_row) const {
        const int P = cost.rows;
        const int M = num_measurements;
        ExtendedAssociation a;
        a.values.resize(static_cast<std::size_t>(P));
        for (int n = 0; n < P; ++n) {
            const int c = col_for_row[static_cast<std::size_t>(n)];
            if (c < M) a.values[static_cast<std::size_t>(n)] = c + 1;
            else if (c == M + n) a.values[static_cast<std::size_t>(n)] = 0;
            else if (c == M + P + n) a.values[static_cast<std::size_t>(n)] = M + 1;
            else throw Error("assignment uses a structurally forbidden column");
        }
        return a;
    }

    [[nodiscard]] std::vector<int> to_columns(const ExtendedAssociation& a) const {
        const int P = cost.rows;
        const int M = num_measurements;
        std::vector<int> cols(static_cast<std::size_t>(P));
        for (int n = 0; n < P; ++n) {
            const int v = a[static_cast<std::size_t>(n)];
            cols[static_cast<std::size_t>(n)] = v == 0 ? M + n : (v == M + 1 ? M + P + n : v - 1);
        }
        return cols;
    }
};

struct RankedAssociation {
    ExtendedAssociation association;
    double cost = 0.0;
};

enum class AssignmentSolver { jonker_volgenant, munkres };

inline RankedAssociation optimal_assignment(const AssignmentProblem& problem,
                                            AssignmentSolver solver = AssignmentSolver::jonker_volgenant) {
    auto sol = solver == AssignmentSolver::munkres ? solve_munkres(problem.cost) : solve_jv(problem.cost);
    if (!sol) throw Error("no finite-cost assignment");
    return {problem.to_association(sol->col_for_row), sol->cost};
}

}  // namespace glmb
