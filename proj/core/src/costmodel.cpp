#include "g2tr/costmodel.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "g2tr/error.hpp"

namespace g2tr {

namespace {

void require_positive(std::uint64_t value, const char* field) {
    if (value < 1) throw Error(ErrorCode::InvalidConfig, std::string(field) + " must be >= 1");
}

double to_double(Flops v) { return static_cast<double>(v); }

}  // namespace

ModelCostSpec reference_model_spec() {
    return {.layers = 28, .hidden = 3584, .ffn = 24576, .kv_heads = 4, .head_dim = 128, .mlp_factor = 6,
            .bytes_per_element = 2};
}

void validate(const ModelCostSpec& spec) {
    require_positive(spec.layers, "layers");
    require_positive(spec.hidden, "hidden");
    require_positive(spec.ffn, "ffn");
    require_positive(spec.kv_heads, "kv_heads");
    require_positive(spec.head_dim, "head_dim");
    if (spec.mlp_factor != 4 && spec.mlp_factor != 6) {
        throw Error(ErrorCode::InvalidConfig, "mlp_factor must be 4 or 6");
    }
    if (spec.bytes_per_element != 1 && spec.bytes_per_element != 2 && spec.bytes_per_element != 4) {
        throw Error(ErrorCode::InvalidConfig, "bytes_per_element must be 1, 2 or 4");
    }
}

Flops prefill_flops(const ModelCostSpec& spec, std::uint64_t tokens) {
    const Flops t = tokens;
    const Flops d = spec.hidden;
    const Flops projections = 8 * t * d * d;
    const Flops attention = 4 * t * t * d;
    const Flops mlp = Flops{spec.mlp_factor} * t * d * spec.ffn;
    return Flops{spec.layers} * (projections + attention + mlp);
}

std::uint64_t kv_bytes(const ModelCostSpec& spec, std::uint64_t tokens) {
    const Flops bytes = Flops{2} * spec.layers * tokens * spec.kv_heads * spec.head_dim * spec.bytes_per_element;
    if (bytes > std::numeric_limits<std::uint64_t>::max()) {
        throw Error(ErrorCode::InvalidConfig, "KV cache size overflows 64 bits");
    }
    return static_cast<std::uint64_t>(bytes);
}

double quadratic_share(const ModelCostSpec& spec, std::uint64_t tokens) {
    const Flops total = prefill_flops(spec, tokens);
    if (total == 0) return 0.0;
    const Flops t = tokens;
    return to_double(Flops{spec.layers} * 4 * t * t * spec.hidden) / to_double(total);
}

CostReport compare(const ModelCostSpec& spec, std::uint64_t n_text, std::uint64_t n_visual, std::uint64_t kept) {
    validate(spec);
    if (n_visual < 1) throw Error(ErrorCode::InvalidConfig, "visual must be >= 1");
    if (kept > n_visual) throw Error(ErrorCode::InvalidConfig, "kept tokens exceed visual tokens");
    if (n_text + kept == 0) throw Error(ErrorCode::InvalidConfig, "reduced sequence is empty");

    CostReport r;
    r.full_tokens = n_text + n_visual;
    r.reduced_tokens = n_text + kept;
    r.full_prefill_flops = prefill_flops(spec, r.full_tokens);
    r.reduced_prefill_flops = prefill_flops(spec, r.reduced_tokens);
    r.full_kv_bytes = kv_bytes(spec, r.full_tokens);
    r.reduced_kv_bytes = kv_bytes(spec, r.reduced_tokens);
    r.flops_ratio = to_double(r.reduced_prefill_flops) / to_double(r.full_prefill_flops);
    r.kv_ratio = static_cast<double>(r.full_kv_bytes) / static_cast<double>(r.reduced_kv_bytes);
    r.flops_speedup = speedup_label(1.0 / r.flops_ratio);
    r.kv_speedup = speedup_label(r.kv_ratio);
    return r;
}

std::string speedup_label(double ratio) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f×", ratio);
    return buf;
}

std::string to_decimal(Flops value) {
    if (value == 0) return "0";
    std::string digits;
    while (value > 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
        value /= 10;
    }
    std::reverse(digits.begin(), digits.end());
    return digits;
}

}  // namespace g2tr
