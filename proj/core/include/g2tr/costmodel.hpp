#pragma once

#include <cstdint>
#include <string>

namespace g2tr {

// Dense decoder geometry used for prefill and KV-cache accounting.
struct ModelCostSpec {
    std::uint64_t layers = 1;
    std::uint64_t hidden = 1;
    std::uint64_t ffn = 1;
    std::uint64_t kv_heads = 1;
    std::uint64_t head_dim = 1;
    // 4 for a two-matmul MLP, 6 for a gated three-matmul MLP
    std::uint64_t mlp_factor = 6;
    std::uint64_t bytes_per_element = 2;
};

using Flops = unsigned __int128;

// 7B-class decoder geometry (28 layers, width 3584, GQA with 4 KV heads of
// 128, gated MLP) whose attention term is about 10% of prefill FLOPs for a
// 256-text + 4608-visual token mix. Default for `g2tr cost`.
ModelCostSpec reference_model_spec();

// Throws InvalidConfig naming the offending field.
void validate(const ModelCostSpec& spec);

// L * (8 T d^2 + 4 T^2 d + c_mlp T d d_ff). Embeddings, norms and the LM head
// are not counted.
Flops prefill_flops(const ModelCostSpec& spec, std::uint64_t tokens);

// 2 * L * T * h_kv * d_h * bytes (keys and values).
std::uint64_t kv_bytes(const ModelCostSpec& spec, std::uint64_t tokens);

// Fraction of prefill FLOPs spent in the T^2 attention term.
double quadratic_share(const ModelCostSpec& spec, std::uint64_t tokens);

struct CostReport {
    std::uint64_t full_tokens = 0;
    std::uint64_t reduced_tokens = 0;
    Flops full_prefill_flops = 0;
    Flops reduced_prefill_flops = 0;
    std::uint64_t full_kv_bytes = 0;
    std::uint64_t reduced_kv_bytes = 0;
    // reduced / full
    double flops_ratio = 1.0;
    // full / reduced
    double kv_ratio = 1.0;
    std::string flops_speedup;
    std::string kv_speedup;
};

// Compares the full sequence (text + visual) with the reduced one (text + kept).
CostReport compare(const ModelCostSpec& spec, std::uint64_t n_text, std::uint64_t n_visual, std::uint64_t kept);

// "1.94×" style label, two decimals.
std::string speedup_label(double ratio);

std::string to_decimal(Flops value);

}  // namespace g2tr
