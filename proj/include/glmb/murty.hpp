#pragma once

#include "glmb/assignment.hpp"

#include <queue>
#include <vector>

namespace glmb {

/// Murty's ranked assignment: the (up to) T lowest-cost assignments of
/// `problem`, costs non-decreasing, ties ordered lexicographically on the
/// association vector. Each subproblem is warm-started from its parent's
/// solution and dual variables.
inline std::vector<RankedAssociation> murty_ranked(const AssignmentProblem& problem, std::size_t T) {
    std::vector<RankedAssociation> out;
    if (T == 0) return out;
    const CostMatrix& C = problem.cost;
    const int P = C.rows;

    struct Node {
        detail::SapState state;
        std::vector<std::uint8_t> fixed;
        std::vector<std::pair<int, int>> bans;
        RankedAssociation result;
    };
    struct Worse {
        bool operator()(const Node* a, const Node* b) const {
            if (a->result.cost != b->result.cost) return a->result.cost > b->result.cost;
            return a->result.association > b->result.association;
        }
    };

    detail::SapSolver solver(C);
    std::vector<std::unique_ptr<Node>> pool;
    std::priority_queue<Node*, std::vector<Node*>, Worse> queue;

    auto finish = [&](std::unique_ptr<Node> node) {
        node->result.cost = assignment_cost(C, node->state.col4row);
        node->result.association = problem.to_association(node->state.col4row);
        queue.push(node.get());
        pool.push_back(std::move(node));
    };

    {
        auto root = std::make_unique<Node>(Node{detail::SapState(C), std::vector<std::uint8_t>(static_cast<std::size_t>(P), 0), {}, {}});
        if (P == 0) {
            out.push_back({ExtendedAssociation{}, 0.0});
            return out;
        }
        if (!solver.solve(root->state, root->fixed, root->bans)) return out;
        finish(std::move(root));
    }

    while (!queue.empty() && out.size() < T) {
        Node* best = queue.top();
        queue.pop();
        out.push_back(best->result);
        if (out.size() == T) break;

        std::vector<std::uint8_t> fixed = best->fixed;
        for (int r = 0; r < P; ++r) {
            if (fixed[static_cast<std::size_t>(r)]) continue;
            auto child = std::make_unique<Node>(Node{best->state, fixed, best->bans, {}});
            const int col = best->state.col4row[static_cast<std::size_t>(r)];
            child->bans.emplace_back(r, col);
            child->state.col4row[static_cast<std::size_t>(r)] = -1;
            if (solver.solve(child->state, child->fixed, child->bans)) finish(std::move(child));
            fixed[static_cast<std::size_t>(r)] = 1;
        }
        // The popped node's storage is no longer needed.
        best->state = detail::SapState(CostMatrix{});
        best->bans.clear();
        best->bans.shrink_to_fit();
        best->fixed.clear();
        best->fixed.shrink_to_fit();
    }
    return out;
}

}  // namespace glmb
