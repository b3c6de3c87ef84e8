#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "g2tr/grid.hpp"
#include "g2tr/guidance.hpp"
#include "g2tr/selection.hpp"

namespace g2tr {

// n(i) for every removed token i, ordered by ascending removed index.
struct MergeAssignment {
    struct Entry {
        std::size_t removed = 0;
        std::size_t target = 0;

        friend bool operator==(const Entry&, const Entry&) = default;
    };
    std::vector<Entry> entries;
};

struct CompressedTokens {
    std::vector<std::size_t> indices;
    // indices.size() rows of `dim` floats, in ascending retained index order
    std::vector<float> features;
    std::size_t dim = 0;
    double lambda = 1.0;

    std::size_t count() const noexcept { return indices.size(); }
    std::span<const float> row(std::size_t j) const noexcept { return {features.data() + j * dim, dim}; }
};

struct MergeReport {
    double surrogate = 0.0;
    double merge_error = 0.0;
    double prune_error = 0.0;
};

// Nearest retained token by cosine for every removed token. Ties go to the
// lowest retained index.
MergeAssignment assign_nearest(const TokenGrid& tokens, const RetainedSet& retained);

// u~_j = (lambda * u_j + sum of absorbed u_i) / (lambda + absorbed count).
// Retained tokens that absorb nothing are copied through unchanged.
CompressedTokens merge(const TokenGrid& tokens, const RetainedSet& retained, const MergeAssignment& assignment,
                       double lambda);

// Sum of the retained scores.
double surrogate_score(const ScoreVector& scores, const RetainedSet& retained);

// Full-size reconstruction from the compressed set: each retained position
// gets its merged vector, each removed position gets its target's merged vector.
TokenGrid expand_merged(const TokenGrid& tokens, const CompressedTokens& compressed,
                        const MergeAssignment& assignment);

// Same expansion with the unmerged retained vectors (pruning only).
TokenGrid expand_pruned(const TokenGrid& tokens, const RetainedSet& retained, const MergeAssignment& assignment);

// Frobenius norm of a - b over all entries.
double frobenius_distance(const FeatureGrid& a, const FeatureGrid& b);

// merge_error and prune_error; surrogate is left at 0 (see surrogate_score).
MergeReport merge_error(const TokenGrid& tokens, const CompressedTokens& compressed,
                        const MergeAssignment& assignment);

}  // namespace g2tr
