#include <doctest.h>

#include <set>

#include "g2tr/error.hpp"
#include "g2tr/selection.hpp"
#include "support/oracles.hpp"
#include "support/random_inputs.hpp"

using namespace g2tr;
using g2tr::testing::Rng;

TEST_CASE("compute_budget") {
    CHECK(compute_budget(0.5, 4096, 1).k == 2048);
    CHECK(compute_budget(0.0, 10, 1).k == 1);
    CHECK(compute_budget(1.0, 7, 1).k == 7);
    CHECK(compute_budget(0.25, 10, 1).k == 3);  // 2.5 rounds away from zero
    CHECK(compute_budget(0.1, 10, 4).k == 4);
    CHECK(compute_budget(0.5, 3, 5).k == 3);    // K_min above N clamps to N

    const auto b = compute_budget(0.5, 16, 1);
    CHECK(b.rho == 0.5);
    CHECK(b.k_min == 1);

    for (double bad : {-0.1, 1.5, std::nan("")}) CHECK_THROWS_AS(compute_budget(bad, 10, 1), Error);
    CHECK_THROWS_AS(compute_budget(0.5, 10, 0), Error);
    CHECK_THROWS_AS(compute_budget(0.5, 0, 1), Error);
}

TEST_CASE("per_anchor_best") {
    SUBCASE("one token per cell") {
        const auto best = per_anchor_best({0.3, 0.9}, {1, 2}, {1, 2});
        CHECK(best == AnchorCandidates{{{0, 0}, 0}, {{0, 1}, 1}});
    }
    SUBCASE("argmax per cell") {
        const auto best = per_anchor_best({0.9, 0.85, 0.1, 0.2}, {1, 4}, {1, 2});
        CHECK(best == AnchorCandidates{{{0, 0}, 0}, {{0, 1}, 3}});
    }
    SUBCASE("ties go to the lowest index") {
        const auto best = per_anchor_best({0.5, 0.5, 0.5, 0.5}, {2, 2}, {1, 1});
        CHECK(best == AnchorCandidates{{{0, 0}, 0}});
    }
    SUBCASE("empty cells are absent") {
        // 1x2 tokens onto 1x4 anchors touch columns 0 and 2 only
        const auto best = per_anchor_best({0.1, 0.2}, {1, 2}, {1, 4});
        CHECK(best == AnchorCandidates{{{0, 0}, 0}, {{0, 2}, 1}});
    }
    CHECK_THROWS_AS(per_anchor_best({0.1}, {1, 2}, {1, 1}), Error);
}

TEST_CASE("balanced_select worked traces") {
    const ScoreVector s{0.9, 0.85, 0.1, 0.2};
    const auto best = per_anchor_best(s, {1, 4}, {1, 2});
    CHECK(balanced_select(s, best, {2, 0.5, 1}).indices == std::vector<std::size_t>{0, 3});
    CHECK(balanced_select(s, best, {3, 0.75, 1}).indices == std::vector<std::size_t>{0, 1, 3});
    CHECK(balanced_select(s, best, compute_budget(1.0, 4, 1)).indices == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(balanced_select(s, best, {1, 0.25, 1}).indices == std::vector<std::size_t>{0});
}

TEST_CASE("balanced_select edge cases") {
    SUBCASE("all-equal scores break ties by index") {
        const ScoreVector s(6, 0.5);
        const auto best = per_anchor_best(s, {2, 3}, {1, 1});
        CHECK(balanced_select(s, best, {3, 0.5, 1}).indices == std::vector<std::size_t>{0, 1, 2});
    }
    SUBCASE("budget smaller than the number of cells keeps the best cells") {
        const ScoreVector s{0.1, 0.9, 0.5, 0.7};
        const auto best = per_anchor_best(s, {1, 4}, {1, 4});
        CHECK(balanced_select(s, best, {2, 0.5, 1}).indices == std::vector<std::size_t>{1, 3});
    }
    SUBCASE("invalid budgets and scores") {
        const ScoreVector s{0.1, 0.2};
        const auto best = per_anchor_best(s, {1, 2}, {1, 1});
        CHECK_THROWS_AS(balanced_select(s, best, {0, 0.0, 1}), Error);
        CHECK_THROWS_AS(balanced_select(s, best, {3, 1.0, 1}), Error);
        CHECK_THROWS_AS(balanced_select({0.1, std::nan("")}, best, {1, 0.5, 1}), Error);
    }
}

TEST_CASE("balanced_select properties on random instances") {
    Rng rng(99);
    for (int seed = 0; seed < 500; ++seed) {
        const std::size_t hu = rng.index(1, 8), wu = rng.index(1, 8), hg = rng.index(1, 4), wg = rng.index(1, 4);
        const std::size_t n = hu * wu;
        const auto s = testing::random_scores(rng, n);
        const auto budget = compute_budget(rng.real(0.0, 1.0), n, rng.index(1, 3));
        const auto best = per_anchor_best(s, {hu, wu}, {hg, wg});
        const auto got = balanced_select(s, best, budget);

        CHECK(got.indices.size() == budget.k);
        CHECK(std::is_sorted(got.indices.begin(), got.indices.end()));
        CHECK(std::adjacent_find(got.indices.begin(), got.indices.end()) == got.indices.end());

        // every candidate is a maximum of its own cell
        for (const auto& [cell, idx] : best) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto c = map_token_to_anchor(i / wu, i % wu, hu, wu, hg, wg);
                if (c == cell) CHECK(s[i] <= s[idx]);
            }
        }

        // coverage: at least min(K, non-empty cells) distinct cells
        std::set<AnchorCoord> covered;
        for (std::size_t i : got.indices) covered.insert(map_token_to_anchor(i / wu, i % wu, hu, wu, hg, wg));
        CHECK(covered.size() >= std::min(budget.k, best.size()));

        CHECK(got.indices == testing::naive_balanced_select(s, hu, wu, hg, wg, budget.k));

        // shifting every score leaves the choice unchanged
        auto shifted = s;
        for (auto& x : shifted) x += 3.0;
        CHECK(balanced_select(shifted, per_anchor_best(shifted, {hu, wu}, {hg, wg}), budget).indices == got.indices);
    }
}

TEST_CASE("removed_indices is the complement") {
    RetainedSet r{{1, 4}, {}};
    CHECK(removed_indices(r, 6) == std::vector<std::size_t>{0, 2, 3, 5});
    CHECK(removed_indices(RetainedSet{{0, 1, 2}, {}}, 3).empty());
}
