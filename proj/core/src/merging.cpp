#include "g2tr/merging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "g2tr/error.hpp"

namespace g2tr {

namespace {

constexpr double kNormFloor = 1e-12;

double norm(std::span<const float> v) {
    double acc = 0.0;
    for (float x : v) acc += static_cast<double>(x) * x;
    return std::sqrt(acc);
}

double dot(std::span<const float> a, std::span<const float> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += static_cast<double>(a[k]) * b[k];
    return acc;
}

void check_retained(const RetainedSet& retained, std::size_t n_tokens) {
    if (retained.indices.empty()) throw Error(ErrorCode::InvalidConfig, "retained set is empty");
    for (std::size_t j = 0; j < retained.indices.size(); ++j) {
        if (retained.indices[j] >= n_tokens || (j > 0 && retained.indices[j] <= retained.indices[j - 1])) {
            throw Error(ErrorCode::InvalidConfig, "retained indices must be strictly increasing and below " +
                                                      std::to_string(n_tokens));
        }
    }
}

// Position of each retained token index inside the compressed sequence.
std::vector<std::size_t> slot_table(std::span<const std::size_t> indices, std::size_t n_tokens) {
    std::vector<std::size_t> slot(n_tokens, n_tokens);
    for (std::size_t j = 0; j < indices.size(); ++j) slot[indices[j]] = j;
    return slot;
}

}  // namespace

MergeAssignment assign_nearest(const TokenGrid& tokens, const RetainedSet& retained) {
    const std::size_t n = tokens.size();
    check_retained(retained, n);

    // Same arithmetic as cosine(), with the retained norms hoisted out of the loop.
    std::vector<double> retained_norm(retained.indices.size());
    for (std::size_t j = 0; j < retained.indices.size(); ++j) retained_norm[j] = norm(tokens.at(retained.indices[j]));

    MergeAssignment assignment;
    assignment.entries.reserve(n - retained.indices.size());
    for (std::size_t i : removed_indices(retained, n)) {
        const auto u = tokens.at(i);
        const double nu = norm(u);
        std::size_t best = retained.indices.front();
        double best_sim = -2.0;
        for (std::size_t j = 0; j < retained.indices.size(); ++j) {
            const std::size_t r = retained.indices[j];
            double sim = 0.0;
            if (nu >= kNormFloor && retained_norm[j] >= kNormFloor) sim = dot(u, tokens.at(r)) / (nu * retained_norm[j]);
            if (sim > best_sim) {
                best_sim = sim;
                best = r;
            }
        }
        assignment.entries.push_back({i, best});
    }
    return assignment;
}

CompressedTokens merge(const TokenGrid& tokens, const RetainedSet& retained, const MergeAssignment& assignment,
                       double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorCode::InvalidConfig, "lambda must be a finite value > 0, got " + std::to_string(lambda));
    }
    const std::size_t n = tokens.size();
    const std::size_t dim = tokens.dim();
    check_retained(retained, n);
    const auto slot = slot_table(retained.indices, n);
    const std::size_t k = retained.indices.size();

    std::vector<double> sums(k * dim, 0.0);
    std::vector<std::size_t> absorbed(k, 0);
    // accumulate in ascending removed index so the result does not depend on entry order
    auto entries = assignment.entries;
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.removed < b.removed; });
    for (const auto& [removed, target] : entries) {
        if (removed >= n || target >= n || slot[target] == n) {
            throw Error(ErrorCode::InvalidConfig, "assignment maps token " + std::to_string(removed) +
                                                      " to non-retained token " + std::to_string(target));
        }
        const std::size_t j = slot[target];
        const auto u = tokens.at(removed);
        for (std::size_t c = 0; c < dim; ++c) sums[j * dim + c] += u[c];
        ++absorbed[j];
    }

    CompressedTokens out{retained.indices, std::vector<float>(k * dim), dim, lambda};
    for (std::size_t j = 0; j < k; ++j) {
        const auto u = tokens.at(retained.indices[j]);
        float* dst = out.features.data() + j * dim;
        if (absorbed[j] == 0) {
            std::copy(u.begin(), u.end(), dst);
            continue;
        }
        const double denom = lambda + static_cast<double>(absorbed[j]);
        for (std::size_t c = 0; c < dim; ++c) {
            dst[c] = static_cast<float>((lambda * u[c] + sums[j * dim + c]) / denom);
        }
    }
    return out;
}

double surrogate_score(const ScoreVector& scores, const RetainedSet& retained) {
    double total = 0.0;
    for (std::size_t i : retained.indices) {
        if (i >= scores.size()) throw Error(ErrorCode::DimensionMismatch, "retained index beyond score vector");
        total += scores[i];
    }
    return total;
}

TokenGrid expand_merged(const TokenGrid& tokens, const CompressedTokens& compressed,
                        const MergeAssignment& assignment) {
    const std::size_t n = tokens.size();
    if (compressed.dim != tokens.dim() || compressed.features.size() != compressed.count() * compressed.dim) {
        throw Error(ErrorCode::DimensionMismatch, "compressed features do not match the token grid");
    }
    const auto slot = slot_table(compressed.indices, n);
    std::vector<float> data(n * tokens.dim());
    std::vector<bool> filled(n, false);
    const auto place = [&](std::size_t position, std::size_t source) {
        if (position >= n || source >= n || slot[source] == n) {
            throw Error(ErrorCode::InvalidConfig, "expansion references a non-retained token");
        }
        const auto row = compressed.row(slot[source]);
        std::copy(row.begin(), row.end(), data.begin() + static_cast<std::ptrdiff_t>(position * tokens.dim()));
        filled[position] = true;
    };
    for (std::size_t r : compressed.indices) place(r, r);
    for (const auto& [removed, target] : assignment.entries) place(removed, target);
    for (std::size_t i = 0; i < n; ++i) {
        if (!filled[i]) throw Error(ErrorCode::InvalidConfig, "assignment does not cover token " + std::to_string(i));
    }
    return TokenGrid(tokens.height(), tokens.width(), tokens.dim(), std::move(data));
}

TokenGrid expand_pruned(const TokenGrid& tokens, const RetainedSet& retained, const MergeAssignment& assignment) {
    CompressedTokens unmerged{retained.indices, {}, tokens.dim(), 1.0};
    unmerged.features.reserve(retained.indices.size() * tokens.dim());
    for (std::size_t r : retained.indices) {
        if (r >= tokens.size()) throw Error(ErrorCode::InvalidConfig, "retained index beyond token grid");
        const auto u = tokens.at(r);
        unmerged.features.insert(unmerged.features.end(), u.begin(), u.end());
    }
    return expand_merged(tokens, unmerged, assignment);
}

double frobenius_distance(const FeatureGrid& a, const FeatureGrid& b) {
    if (a.data().size() != b.data().size()) {
        throw Error(ErrorCode::DimensionMismatch, "frobenius distance of differently sized grids");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) {
        const double diff = static_cast<double>(a.data()[k]) - b.data()[k];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

MergeReport merge_error(const TokenGrid& tokens, const CompressedTokens& compressed,
                        const MergeAssignment& assignment) {
    RetainedSet retained{compressed.indices, {}};
    MergeReport report;
    report.merge_error = frobenius_distance(tokens, expand_merged(tokens, compressed, assignment));
    report.prune_error = frobenius_distance(tokens, expand_pruned(tokens, retained, assignment));
    return report;
}

}  // namespace g2tr
