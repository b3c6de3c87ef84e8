#include "g2tr/selection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "g2tr/error.hpp"

namespace g2tr {

namespace {

// Moves the best `count` entries of `pool` to its front, best first.
void partial_rank(std::vector<std::size_t>& pool, std::size_t count, const ScoreVector& scores) {
    const auto better = [&scores](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    };
    count = std::min(count, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count), pool.end(), better);
}

}  // namespace

Budget compute_budget(double rho, std::size_t n_tokens, std::size_t k_min) {
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "rho must lie in [0, 1], got " + std::to_string(rho));
    }
    if (k_min < 1) throw Error(ErrorCode::InvalidConfig, "kmin must be >= 1");
    if (n_tokens < 1) throw Error(ErrorCode::InvalidConfig, "token count must be >= 1");

    // std::round rounds halves away from zero
    const auto target = static_cast<std::size_t>(std::round(rho * static_cast<double>(n_tokens)));
    return {std::min(n_tokens, std::max(k_min, target)), rho, k_min};
}

AnchorCandidates per_anchor_best(const ScoreVector& scores, GridShape tokens, GridShape anchors) {
    if (scores.size() != tokens.rows * tokens.cols) {
        throw Error(ErrorCode::DimensionMismatch, std::to_string(scores.size()) + " scores for a " +
                                                      std::to_string(tokens.rows) + "x" +
                                                      std::to_string(tokens.cols) + " token grid");
    }
    AnchorCandidates best;
    for (std::size_t p = 0; p < tokens.rows; ++p) {
        for (std::size_t q = 0; q < tokens.cols; ++q) {
            const std::size_t i = p * tokens.cols + q;
            const auto cell = map_token_to_anchor(p, q, tokens.rows, tokens.cols, anchors.rows, anchors.cols);
            // tokens arrive in ascending index order, so strict > keeps the lowest index on ties
            auto [it, inserted] = best.try_emplace(cell, i);
            if (!inserted && scores[i] > scores[it->second]) it->second = i;
        }
    }
    return best;
}

RetainedSet balanced_select(const ScoreVector& scores, const AnchorCandidates& candidates, const Budget& budget) {
    const std::size_t n = scores.size();
    if (budget.k < 1 || budget.k > n) {
        throw Error(ErrorCode::InvalidConfig,
                    "budget " + std::to_string(budget.k) + " is invalid for " + std::to_string(n) + " tokens");
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(scores[i])) {
            throw Error(ErrorCode::InvalidConfig, "score of token " + std::to_string(i) + " is not finite");
        }
    }

    std::vector<std::size_t> representatives;
    representatives.reserve(candidates.size());
    for (const auto& [cell, index] : candidates) representatives.push_back(index);

    partial_rank(representatives, budget.k, scores);
    const std::size_t first_stage = std::min(budget.k, representatives.size());

    std::vector<bool> chosen(n, false);
    std::vector<std::size_t> selected(representatives.begin(),
                                      representatives.begin() + static_cast<std::ptrdiff_t>(first_stage));
    for (std::size_t i : selected) chosen[i] = true;

    if (selected.size() < budget.k) {
        std::vector<std::size_t> rest;
        rest.reserve(n - selected.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!chosen[i]) rest.push_back(i);
        }
        const std::size_t fill = budget.k - selected.size();
        partial_rank(rest, fill, scores);
        selected.insert(selected.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(fill));
    }

    std::sort(selected.begin(), selected.end());
    return {std::move(selected), candidates};
}

std::vector<std::size_t> removed_indices(const RetainedSet& retained, std::size_t n_tokens) {
    std::vector<std::size_t> removed;
    removed.reserve(n_tokens - std::min(n_tokens, retained.indices.size()));
    auto it = retained.indices.begin();
    for (std::size_t i = 0; i < n_tokens; ++i) {
        if (it != retained.indices.end() && *it == i) {
            ++it;
        } else {
            removed.push_back(i);
        }
    }
    return removed;
}

}  // namespace g2tr
