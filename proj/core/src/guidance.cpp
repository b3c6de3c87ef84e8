#include "g2tr/guidance.hpp"

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

}  // namespace

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::Latent: return "latent";
        case Strategy::Random: return "random";
        case Strategy::Attention: return "attn";
        case Strategy::TextSimilarity: return "textsim";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
    if (name == "latent") return Strategy::Latent;
    if (name == "random") return Strategy::Random;
    if (name == "attn") return Strategy::Attention;
    if (name == "textsim") return Strategy::TextSimilarity;
    return std::nullopt;
}

double cosine(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "cosine of vectors with lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    const double na = norm(a);
    const double nb = norm(b);
    if (na < kNormFloor || nb < kNormFloor) return 0.0;
    double dot = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) dot += static_cast<double>(a[k]) * b[k];
    return dot / (na * nb);
}

ScoreVector score_latent(const TokenGrid& tokens, const AnchorGrid& anchors) {
    if (anchors.dim() != tokens.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "anchors have dim " + std::to_string(anchors.dim()) +
                                                      ", tokens have dim " + std::to_string(tokens.dim()));
    }
    const auto cells = anchor_index_map(tokens.height(), tokens.width(), anchors.height(), anchors.width());
    ScoreVector scores(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) scores[i] = cosine(tokens.at(i), anchors.at(cells[i]));
    return scores;
}

ScoreVector score_random(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ScoreVector scores(n);
    for (auto& s : scores) s = rng.uniform();
    return scores;
}

ScoreVector score_attention_proxy(const SideInputs& side, std::size_t n_tokens) {
    if (!side.attention_importance) {
        throw Error(ErrorCode::MissingSideInput, "attention strategy needs the attention importance section");
    }
    const auto& attn = *side.attention_importance;
    if (attn.size() != n_tokens) {
        throw Error(ErrorCode::DimensionMismatch, "attention importance has " + std::to_string(attn.size()) +
                                                      " values for " + std::to_string(n_tokens) + " tokens");
    }
    ScoreVector scores(attn.size());
    for (std::size_t i = 0; i < attn.size(); ++i) {
        if (!std::isfinite(attn[i]) || attn[i] < 0.0f) {
            throw Error(ErrorCode::InvalidConfig,
                        "attention importance at token " + std::to_string(i) + " is not a finite nonnegative value");
        }
        scores[i] = attn[i];
    }
    return scores;
}

ScoreVector score_text_similarity(const TokenGrid& tokens, const SideInputs& side) {
    if (!side.text_embeddings || side.text_embeddings->empty()) {
        throw Error(ErrorCode::MissingSideInput, "textsim strategy needs the text embedding section");
    }
    const auto& text = *side.text_embeddings;
    const std::size_t dim = tokens.dim();
    if (text.size() % dim != 0) {
        throw Error(ErrorCode::DimensionMismatch, "text embeddings hold " + std::to_string(text.size()) +
                                                      " floats, not a multiple of token dim " + std::to_string(dim));
    }
    const std::size_t n_text = text.size() / dim;
    std::vector<double> acc(dim, 0.0);
    for (std::size_t t = 0; t < n_text; ++t) {
        for (std::size_t k = 0; k < dim; ++k) acc[k] += text[t * dim + k];
    }
    std::vector<float> mean(dim);
    for (std::size_t k = 0; k < dim; ++k) mean[k] = static_cast<float>(acc[k] / static_cast<double>(n_text));

    ScoreVector scores(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) scores[i] = cosine(tokens.at(i), mean);
    return scores;
}

ScoreVector score_tokens(Strategy strategy, const TokenGrid& tokens, const AnchorGrid& anchors,
                         const SideInputs& side, std::uint64_t seed) {
    switch (strategy) {
        case Strategy::Latent: return score_latent(tokens, anchors);
        case Strategy::Random: return score_random(tokens.size(), seed);
        case Strategy::Attention: return score_attention_proxy(side, tokens.size());
        case Strategy::TextSimilarity: return score_text_similarity(tokens, side);
    }
    throw Error(ErrorCode::Internal, "unhandled strategy");
}

}  // namespace g2tr
