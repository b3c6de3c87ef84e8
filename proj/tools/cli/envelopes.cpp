#include "envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "g2tr/error.hpp"
#include "g2tr/io/feature_dump.hpp"

namespace g2tr::cli {

namespace {

Json rounded(const std::vector<double>& values) {
    Json out = Json::array();
    for (double v : values) out.push_back(fixed9(v));
    return out;
}

// FLOP counts fit 64 bits for any realistic geometry; larger ones go out as strings.
Json flops_value(Flops v) {
    if (v <= std::numeric_limits<std::uint64_t>::max()) return static_cast<std::uint64_t>(v);
    return to_decimal(v);
}

Json parse_json(std::string_view text, const char* what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string(what) + " is not valid JSON: " + e.what());
    }
}

std::uint64_t require_uint(const Json& doc, const char* field) {
    if (!doc.contains(field)) throw Error(ErrorCode::InvalidConfig, std::string("missing field ") + field);
    const auto& v = doc.at(field);
    if (!v.is_number_unsigned()) {
        throw Error(ErrorCode::InvalidConfig, std::string("field ") + field + " must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

TokenId require_id(const Json& doc, const char* field) {
    if (!doc.contains(field) || !doc.at(field).is_number_integer()) {
        throw Error(ErrorCode::MalformedSpec, std::string("field ") + field + " must be an integer");
    }
    return doc.at(field).get<TokenId>();
}

}  // namespace

double fixed9(double value) {
    if (!std::isfinite(value)) return value;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return std::strtod(buf, nullptr);
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
    }
    if (const std::size_t rest = bytes.size() - i; rest > 0) {
        std::uint32_t v = bytes[i] << 16;
        if (rest == 2) v |= bytes[i + 1] << 8;
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

Json config_json(const ReductionConfig& config) {
    Json c;
    c["rho"] = fixed9(config.rho);
    c["kmin"] = config.k_min;
    c["lambda"] = fixed9(config.lambda);
    c["strategy"] = std::string(to_string(config.strategy));
    c["seed"] = config.seed;
    return c;
}

Json layout_json(const RebuiltSequence& seq) {
    Json l;
    l["length"] = seq.real_length;
    l["input_ids"] = seq.input_ids;
    l["attention_mask"] = seq.attention_mask;
    l["position_ids"] = seq.position_ids;
    return l;
}

Json reduction_json(const ReductionResult& result, const RebuiltSequence& original,
                    const RebuiltSequence& rebuilt, const MergedFeaturesRef& merged) {
    const auto& tokens_dim = result.compressed.dim;
    Json doc;
    doc["format"] = "g2tr.reduction.v1";
    doc["config"] = config_json(result.config);

    Json grid;
    grid["token_count"] = result.scores.size();
    grid["token_dim"] = tokens_dim;
    grid["anchor_rows"] = result.anchors.height();
    grid["anchor_cols"] = result.anchors.width();
    doc["grid"] = grid;

    doc["budget"] = result.budget.k;
    doc["scores"] = rounded(result.scores);
    doc["retained"] = result.retained.indices;

    Json assignment = Json::array();
    for (const auto& e : result.assignment.entries) assignment.push_back(Json::array({e.removed, e.target}));
    doc["assignment"] = assignment;

    doc["surrogate"] = fixed9(result.report.surrogate);
    doc["merge_error"] = fixed9(result.report.merge_error);
    doc["prune_error"] = fixed9(result.report.prune_error);

    Json layout;
    layout["original_length"] = original.real_length;
    layout["rebuilt"] = layout_json(rebuilt);
    doc["layout"] = layout;

    Json features;
    features["rows"] = result.compressed.count();
    features["dim"] = result.compressed.dim;
    if (merged.sidecar_path) {
        features["encoding"] = "f32le";
        features["path"] = *merged.sidecar_path;
    } else {
        features["encoding"] = "base64-f32le";
        features["data"] = base64_encode(io::encode_f32le(result.compressed.features));
    }
    doc["merged_features"] = features;
    return doc;
}

Json model_spec_json(const ModelCostSpec& spec) {
    Json s;
    s["layers"] = spec.layers;
    s["hidden"] = spec.hidden;
    s["ffn"] = spec.ffn;
    s["kv_heads"] = spec.kv_heads;
    s["head_dim"] = spec.head_dim;
    s["mlp_factor"] = spec.mlp_factor;
    s["bytes_per_element"] = spec.bytes_per_element;
    return s;
}

Json cost_json(const ModelCostSpec& spec, const CostReport& report, std::uint64_t n_text, std::uint64_t n_visual,
               std::uint64_t kept) {
    Json doc;
    doc["format"] = "g2tr.cost.v1";
    doc["spec"] = model_spec_json(spec);

    Json tokens;
    tokens["text"] = n_text;
    tokens["visual"] = n_visual;
    tokens["kept"] = kept;
    tokens["full"] = report.full_tokens;
    tokens["reduced"] = report.reduced_tokens;
    doc["tokens"] = tokens;

    doc["prefill_flops"] = Json{{"full", flops_value(report.full_prefill_flops)},
                                {"reduced", flops_value(report.reduced_prefill_flops)}};
    doc["kv_bytes"] = Json{{"full", report.full_kv_bytes}, {"reduced", report.reduced_kv_bytes}};
    doc["flops_ratio"] = fixed9(report.flops_ratio);
    doc["kv_ratio"] = fixed9(report.kv_ratio);
    doc["flops_speedup"] = report.flops_speedup;
    doc["kv_speedup"] = report.kv_speedup;
    doc["quadratic_share"] = fixed9(quadratic_share(spec, report.full_tokens));
    return doc;
}

ModelCostSpec parse_model_spec(std::string_view text) {
    const auto doc = parse_json(text, "model spec");
    if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "model spec must be a JSON object");
    static constexpr const char* kFields[] = {"layers",   "hidden",     "ffn",          "kv_heads",
                                              "head_dim", "mlp_factor", "bytes_per_element"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(std::begin(kFields), std::end(kFields), key) == std::end(kFields)) {
            throw Error(ErrorCode::InvalidConfig, "unknown field " + key);
        }
    }
    ModelCostSpec spec{require_uint(doc, "layers"),     require_uint(doc, "hidden"),
                       require_uint(doc, "ffn"),        require_uint(doc, "kv_heads"),
                       require_uint(doc, "head_dim"),   require_uint(doc, "mlp_factor"),
                       require_uint(doc, "bytes_per_element")};
    validate(spec);
    return spec;
}

SequenceSpec parse_sequence_spec(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedSpec, std::string("layout is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("segments") || !doc.at("segments").is_array()) {
        throw Error(ErrorCode::MalformedSpec, "layout needs a segments array");
    }
    SequenceSpec spec;
    spec.pad_token_id = require_id(doc, "pad_token_id");
    spec.img_context_token_id = require_id(doc, "img_context_token_id");
    spec.image_start_token_id = require_id(doc, "image_start_token_id");
    spec.image_end_token_id = require_id(doc, "image_end_token_id");
    for (const auto& seg : doc.at("segments")) {
        const auto type = seg.value("type", std::string{});
        if (type == "text") {
            if (!seg.contains("ids") || !seg.at("ids").is_array()) {
                throw Error(ErrorCode::MalformedSpec, "text segment needs an ids array");
            }
            std::vector<TokenId> ids;
            for (const auto& id : seg.at("ids")) {
                if (!id.is_number_integer()) throw Error(ErrorCode::MalformedSpec, "text ids must be integers");
                ids.push_back(id.get<TokenId>());
            }
            spec.segments.push_back(Segment::text(std::move(ids)));
        } else if (type == "image_start") {
            spec.segments.push_back(Segment::image_start());
        } else if (type == "visual") {
            if (!seg.contains("count") || !seg.at("count").is_number_unsigned()) {
                throw Error(ErrorCode::MalformedSpec, "visual segment needs a nonnegative count");
            }
            spec.segments.push_back(Segment::visual(seg.at("count").get<std::size_t>()));
        } else if (type == "image_end") {
            spec.segments.push_back(Segment::image_end());
        } else {
            throw Error(ErrorCode::MalformedSpec, "unknown segment type \"" + type + "\"");
        }
    }
    validate(spec);
    return spec;
}

std::string to_text(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace g2tr::cli
