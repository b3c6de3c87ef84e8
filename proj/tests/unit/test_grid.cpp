#include <doctest.h>

#include "g2tr/error.hpp"
#include "g2tr/grid.hpp"
#include "support/oracles.hpp"
#include "support/random_inputs.hpp"

using namespace g2tr;
using g2tr::testing::Rng;

TEST_CASE("grid construction enforces shape invariants") {
    CHECK_NOTHROW(TokenGrid(2, 3, 4, std::vector<float>(24)));
    CHECK_THROWS_AS(TokenGrid(2, 3, 4, std::vector<float>(23)), Error);
    CHECK_THROWS_AS(TokenGrid(0, 3, 4, std::vector<float>{}), Error);
    CHECK_THROWS_AS(ProjectionMatrix(2, 3, std::vector<float>(5)), Error);

    TokenGrid g(2, 3, 1, {0, 1, 2, 3, 4, 5});
    CHECK(g.at(1, 2)[0] == 5.0f);
    CHECK(g.at(4)[0] == 4.0f);  // i = p * W + q
}

TEST_CASE("pool_latents worked examples") {
    SUBCASE("identical vectors") {
        LatentGrid z(2, 2, 3, {1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3});
        const auto a = pool_latents(z);
        CHECK(a.height() == 1);
        CHECK(a.width() == 1);
        CHECK(a.data() == std::vector<float>{1, 2, 3});
    }
    SUBCASE("2x2 mean") {
        const auto a = pool_latents(LatentGrid(2, 2, 1, {1, 3, 5, 7}));
        CHECK(a.data() == std::vector<float>{4.0f});
    }
    SUBCASE("3x3 partial windows") {
        const auto a = pool_latents(LatentGrid(3, 3, 1, {1, 2, 3, 4, 5, 6, 7, 8, 9}));
        CHECK(a.height() == 2);
        CHECK(a.width() == 2);
        CHECK(a.data() == std::vector<float>{3.0f, 4.5f, 7.5f, 9.0f});
    }
    SUBCASE("1x1 grid passes through") {
        const auto a = pool_latents(LatentGrid(1, 1, 2, {0.25f, -4.0f}));
        CHECK(a.data() == std::vector<float>{0.25f, -4.0f});
    }
}

TEST_CASE("pool_latents matches the double-loop oracle up to 8x8") {
    Rng rng(11);
    for (std::size_t h = 1; h <= 8; ++h) {
        for (std::size_t w = 1; w <= 8; ++w) {
            const std::size_t d = rng.index(1, 4);
            const auto z = testing::random_grid<LatentGrid>(rng, h, w, d);
            const auto got = pool_latents(z);
            const auto want = testing::naive_pool(z);
            REQUIRE(got.data().size() == want.size());
            CHECK(got.height() == (h + 1) / 2);
            CHECK(got.width() == (w + 1) / 2);
            for (std::size_t k = 0; k < want.size(); ++k) CHECK(got.data()[k] == doctest::Approx(want[k]).epsilon(1e-6));
        }
    }
}

TEST_CASE("align_anchors") {
    const AnchorGrid a(1, 1, 2, {3.0f, -1.0f});
    SUBCASE("identity path without projection") {
        const AnchorGrid four(1, 2, 4, {1, 2, 3, 4, 5, 6, 7, 8});
        CHECK(align_anchors(four, std::nullopt, 4) == four);
    }
    SUBCASE("identity matrix") {
        const auto out = align_anchors(a, ProjectionMatrix(2, 2, {1, 0, 0, 1}), 2);
        CHECK(out.data() == std::vector<float>{3.0f, -1.0f});
    }
    SUBCASE("rectangular projection") {
        const AnchorGrid ones(1, 1, 2, {1.0f, 1.0f});
        const auto out = align_anchors(ones, ProjectionMatrix(2, 3, {1, 0, 0, 0, 2, 0}), 3);
        CHECK(out.dim() == 3);
        CHECK(out.data() == std::vector<float>{1.0f, 2.0f, 0.0f});
    }
    SUBCASE("dimension mismatches") {
        CHECK_THROWS_AS(align_anchors(a, std::nullopt, 3), Error);
        CHECK_THROWS_AS(align_anchors(a, ProjectionMatrix(3, 2, std::vector<float>(6)), 2), Error);
        try {
            align_anchors(a, std::nullopt, 5);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DimensionMismatch);
        }
    }
}

TEST_CASE("pooling and projection commute") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t h = rng.index(1, 7), w = rng.index(1, 7), dz = rng.index(1, 5), du = rng.index(1, 5);
        const auto z = testing::random_grid<LatentGrid>(rng, h, w, dz);
        const ProjectionMatrix proj(dz, du, rng.normals(dz * du));

        const auto pool_then_project = align_anchors(pool_latents(z), proj, du);

        // project every latent cell first, then pool
        const auto projected = align_anchors(AnchorGrid(h, w, dz, z.data()), proj, du);
        const auto project_then_pool = pool_latents(LatentGrid(h, w, du, projected.data()));

        REQUIRE(pool_then_project.data().size() == project_then_pool.data().size());
        for (std::size_t k = 0; k < project_then_pool.data().size(); ++k) {
            CHECK(std::abs(pool_then_project.data()[k] - project_then_pool.data()[k]) < 1e-5);
        }
    }
}

TEST_CASE("map_token_to_anchor worked examples") {
    CHECK(map_token_to_anchor(0, 0, 7, 5, 3, 2) == AnchorCoord{0, 0});
    CHECK(map_token_to_anchor(3, 2, 4, 4, 2, 2) == AnchorCoord{1, 1});
    CHECK(map_token_to_anchor(2, 1, 6, 6, 2, 2) == AnchorCoord{0, 0});
    static_assert(map_token_to_anchor(3, 3, 4, 4, 2, 2).row == 1);
}

TEST_CASE("map_token_to_anchor is total, in bounds and monotone for extents up to 64") {
    std::size_t violations = 0;
    for (std::size_t hu = 1; hu <= 64; ++hu) {
        for (std::size_t hg = 1; hg <= 64; ++hg) {
            std::size_t prev = 0;
            for (std::size_t p = 0; p < hu; ++p) {
                // the axes are independent, so each is checked exhaustively on its own
                const auto c = map_token_to_anchor(p, 0, hu, 1, hg, 1);
                if (c.row >= hg || c.col != 0 || c.row < prev) ++violations;
                prev = c.row;
            }
        }
    }
    CHECK(violations == 0);

    for (std::size_t wu = 1; wu <= 64; ++wu) {
        for (std::size_t wg = 1; wg <= 64; ++wg) {
            std::size_t prev = 0;
            for (std::size_t q = 0; q < wu; ++q) {
                const auto c = map_token_to_anchor(0, q, 1, wu, 1, wg);
                if (c.col >= wg || c.col < prev) ++violations;
                prev = c.col;
            }
        }
    }
    CHECK(violations == 0);
}
