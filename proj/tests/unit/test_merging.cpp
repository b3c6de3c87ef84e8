#include <doctest.h>

#include <cmath>
#include <numeric>

#include "g2tr/error.hpp"
#include "g2tr/merging.hpp"
#include "support/oracles.hpp"
#include "support/random_inputs.hpp"

using namespace g2tr;
using g2tr::testing::Rng;

namespace {

RetainedSet retained_of(std::vector<std::size_t> idx) { return {std::move(idx), {}}; }

// The three-token example: u0 = [1,0], u1 = [0,1], u2 = [1,0.1], S = {0,1}.
TokenGrid running_example() { return TokenGrid(1, 3, 2, {1.0f, 0.0f, 0.0f, 1.0f, 1.0f, 0.1f}); }

}  // namespace

TEST_CASE("assign_nearest") {
    SUBCASE("running example") {
        const auto a = assign_nearest(running_example(), retained_of({0, 1}));
        REQUIRE(a.entries.size() == 1);
        CHECK(a.entries[0] == MergeAssignment::Entry{2, 0});
    }
    SUBCASE("duplicate of a retained token") {
        TokenGrid u(1, 3, 2, {1, 2, 3, 4, 3, 4});
        const auto a = assign_nearest(u, retained_of({0, 1}));
        CHECK(a.entries[0].target == 1);
    }
    SUBCASE("zero token lands on the lowest retained index") {
        TokenGrid u(1, 4, 2, {0, 0, 0, 1, 1, 0, 0, 0});
        const auto a = assign_nearest(u, retained_of({1, 2}));
        REQUIRE(a.entries.size() == 2);
        CHECK(a.entries[0] == MergeAssignment::Entry{0, 1});
        CHECK(a.entries[1] == MergeAssignment::Entry{3, 1});
    }
    SUBCASE("invalid retained sets") {
        CHECK_THROWS_AS(assign_nearest(running_example(), retained_of({})), Error);
        CHECK_THROWS_AS(assign_nearest(running_example(), retained_of({1, 0})), Error);
        CHECK_THROWS_AS(assign_nearest(running_example(), retained_of({5})), Error);
    }
}

TEST_CASE("merge") {
    const auto u = running_example();
    const auto r = retained_of({0, 1});
    const auto a = assign_nearest(u, r);

    SUBCASE("lambda = 1 weighted mean") {
        const auto c = merge(u, r, a, 1.0);
        CHECK(c.indices == std::vector<std::size_t>{0, 1});
        CHECK(c.row(0)[0] == doctest::Approx(1.0));
        CHECK(c.row(0)[1] == doctest::Approx(0.05));
        CHECK(c.row(1)[0] == 0.0f);
        CHECK(c.row(1)[1] == 1.0f);
    }
    SUBCASE("large lambda keeps the retained token") {
        const auto c = merge(u, r, a, 1e9);
        CHECK(std::abs(c.row(0)[0] - 1.0f) < 1e-6);
        CHECK(std::abs(c.row(0)[1] - 0.0f) < 1e-6);
    }
    SUBCASE("nothing removed is an identity") {
        const auto all = retained_of({0, 1, 2});
        const auto c = merge(u, all, assign_nearest(u, all), 1.0);
        CHECK(c.features == u.data());
    }
    SUBCASE("invalid lambda") {
        for (double bad : {0.0, -1.0, std::nan("")}) CHECK_THROWS_AS(merge(u, r, a, bad), Error);
    }
    SUBCASE("assignment to a removed token") {
        MergeAssignment bogus{{{2, 2}}};
        CHECK_THROWS_AS(merge(u, r, bogus, 1.0), Error);
    }
}

TEST_CASE("surrogate_score") {
    CHECK(surrogate_score({0.5}, retained_of({0})) == 0.5);
    CHECK(surrogate_score({0.9, 0.85, 0.1, 0.2}, retained_of({0, 3})) == doctest::Approx(1.1));
    CHECK(surrogate_score(ScoreVector(8, 0.25), retained_of({1, 2, 5})) == doctest::Approx(0.75));
}

TEST_CASE("merge_error") {
    SUBCASE("running example") {
        const auto u = running_example();
        const auto r = retained_of({0, 1});
        const auto a = assign_nearest(u, r);
        const auto c = merge(u, r, a, 1.0);
        const auto expanded = expand_merged(u, c, a);
        CHECK(expanded.at(2)[0] == doctest::Approx(1.0));
        CHECK(expanded.at(2)[1] == doctest::Approx(0.05));
        const auto rep = merge_error(u, c, a);
        CHECK(rep.merge_error == doctest::Approx(std::sqrt(0.05 * 0.05 * 2)).epsilon(1e-6));
        CHECK(rep.merge_error == doctest::Approx(0.0707).epsilon(1e-3));
        CHECK(rep.prune_error == doctest::Approx(0.1).epsilon(1e-6));
    }
    SUBCASE("keep-all is exact") {
        Rng rng(2);
        const auto u = testing::random_grid<TokenGrid>(rng, 3, 3, 4);
        const auto all = retained_of({0, 1, 2, 3, 4, 5, 6, 7, 8});
        const auto a = assign_nearest(u, all);
        const auto rep = merge_error(u, merge(u, all, a, 1.0), a);
        CHECK(rep.merge_error == 0.0);
        CHECK(rep.prune_error == 0.0);
    }
    SUBCASE("identical tokens reconstruct exactly") {
        TokenGrid u(2, 2, 3, {1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3});
        const auto r = retained_of({2});
        const auto a = assign_nearest(u, r);
        CHECK(merge_error(u, merge(u, r, a, 1.0), a).merge_error == 0.0);
    }
}

TEST_CASE("assignment and merge agree with brute force on random instances") {
    Rng rng(1234);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t h = rng.index(1, 8), w = rng.index(1, 8), d = rng.index(1, 16);
        const auto u = testing::random_grid<TokenGrid>(rng, h, w, d);
        const std::size_t n = u.size();
        const std::size_t k = rng.index(1, n);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        std::vector<std::size_t> keep(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(keep.begin(), keep.end());
        const double lambda = rng.coin() ? 1.0 : rng.real(0.1, 4.0);

        const auto r = retained_of(keep);
        const auto a = assign_nearest(u, r);
        const auto target = testing::brute_assign(u, keep);
        REQUIRE(a.entries.size() == n - k);
        for (const auto& e : a.entries) CHECK(e.target == target[e.removed]);

        const auto c = merge(u, r, a, lambda);
        const auto ref = testing::reference_merge(u, keep, target, lambda);
        REQUIRE(c.features.size() == ref.size());
        for (std::size_t x = 0; x < ref.size(); ++x) {
            CHECK(std::abs(c.features[x] - ref[x]) <= 1e-6 * std::max(1.0, std::abs(ref[x])));
        }

        // convex combination: each merged row lies within the per-component
        // range of the tokens it absorbed
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t col = 0; col < d; ++col) {
                float lo = u.at(keep[j])[col], hi = lo;
                for (const auto& e : a.entries) {
                    if (e.target != keep[j]) continue;
                    lo = std::min(lo, u.at(e.removed)[col]);
                    hi = std::max(hi, u.at(e.removed)[col]);
                }
                CHECK(c.row(j)[col] >= lo - 1e-6f);
                CHECK(c.row(j)[col] <= hi + 1e-6f);
            }
        }

        const auto rep = merge_error(u, c, a);
        CHECK(rep.merge_error >= 0.0);
        CHECK(rep.prune_error >= 0.0);
    }
}

TEST_CASE("merge is independent of the order of assignment entries") {
    Rng rng(77);
    const auto u = testing::random_grid<TokenGrid>(rng, 4, 4, 5);
    const auto r = retained_of({0, 5, 10, 15});
    auto a = assign_nearest(u, r);
    const auto forward = merge(u, r, a, 1.0);
    std::reverse(a.entries.begin(), a.entries.end());
    const auto backward = merge(u, r, a, 1.0);
    CHECK(forward.features == backward.features);
}
