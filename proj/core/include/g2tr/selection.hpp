#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "g2tr/grid.hpp"
#include "g2tr/guidance.hpp"

namespace g2tr {

struct Budget {
    std::size_t k = 0;
    double rho = 0.0;
    std::size_t k_min = 1;
};

struct GridShape {
    std::size_t rows = 0;
    std::size_t cols = 0;
};

using AnchorCandidates = std::map<AnchorCoord, std::size_t>;

struct RetainedSet {
    // strictly increasing token indices
    std::vector<std::size_t> indices;
    // best token of every non-empty anchor cell
    AnchorCandidates per_anchor_best;
};

// K = min(N, max(K_min, round_half_away(rho * N))).
// Throws InvalidConfig for rho outside [0, 1], n_tokens == 0 or k_min == 0.
Budget compute_budget(double rho, std::size_t n_tokens, std::size_t k_min);

// Highest-scoring token inside each anchor cell that covers at least one
// token. Ties go to the lower token index.
AnchorCandidates per_anchor_best(const ScoreVector& scores, GridShape tokens, GridShape anchors);

// Takes the top min(K, |B|) cell representatives, then fills the rest of the
// budget once from everything not yet chosen. Ties rank by lower index.
RetainedSet balanced_select(const ScoreVector& scores, const AnchorCandidates& candidates, const Budget& budget);

// Complement of the retained indices within [0, n_tokens), ascending.
std::vector<std::size_t> removed_indices(const RetainedSet& retained, std::size_t n_tokens);

}  // namespace g2tr
