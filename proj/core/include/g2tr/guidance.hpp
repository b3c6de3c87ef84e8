#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "g2tr/grid.hpp"

namespace g2tr {

// One importance score per token, in token order.
using ScoreVector = std::vector<double>;

enum class Strategy { Latent, Random, Attention, TextSimilarity };

std::string_view to_string(Strategy s) noexcept;

// Accepts the CLI spellings latent|random|attn|textsim.
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

// Host-supplied inputs for the ablation scorers.
struct SideInputs {
    // n_text vectors of the token dimension, flattened row-major.
    std::optional<std::vector<float>> text_embeddings;
    // one nonnegative value per token
    std::optional<std::vector<float>> attention_importance;
};

// a.b / (|a| |b|), or 0 when either norm is below 1e-12.
double cosine(std::span<const float> a, std::span<const float> b);

// Cosine of each token against its matched anchor.
ScoreVector score_latent(const TokenGrid& tokens, const AnchorGrid& anchors);

// SplitMix64 stream; value k is (next() >> 11) * 2^-53, uniform on [0, 1).
ScoreVector score_random(std::size_t n, std::uint64_t seed);

ScoreVector score_attention_proxy(const SideInputs& side, std::size_t n_tokens);

// Cosine of each token against the mean text embedding.
ScoreVector score_text_similarity(const TokenGrid& tokens, const SideInputs& side);

// Dispatches on strategy. Anchors must already be aligned for Latent.
ScoreVector score_tokens(Strategy strategy, const TokenGrid& tokens, const AnchorGrid& anchors,
                         const SideInputs& side, std::uint64_t seed);

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace g2tr
