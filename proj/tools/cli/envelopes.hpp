#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "g2tr/costmodel.hpp"
#include "g2tr/layout.hpp"
#include "g2tr/pipeline.hpp"

namespace g2tr::cli {

// Key order is insertion order so documents serialize identically run to run.
using Json = nlohmann::ordered_json;

// Rounds to 9 significant digits; JSON then prints the shortest form of that value.
double fixed9(double value);

std::string base64_encode(std::span<const std::uint8_t> bytes);

// Where the merged K x d feature block lives: inline base64 or a sidecar file.
struct MergedFeaturesRef {
    std::optional<std::string> sidecar_path;
};

Json config_json(const ReductionConfig& config);
Json layout_json(const RebuiltSequence& seq);
Json reduction_json(const ReductionResult& result, const RebuiltSequence& original,
                    const RebuiltSequence& rebuilt, const MergedFeaturesRef& merged);
Json cost_json(const ModelCostSpec& spec, const CostReport& report, std::uint64_t n_text, std::uint64_t n_visual,
               std::uint64_t kept);
Json model_spec_json(const ModelCostSpec& spec);

// Field names match ModelCostSpec exactly; throws InvalidConfig naming the field.
ModelCostSpec parse_model_spec(std::string_view text);

// {"pad_token_id", "img_context_token_id", "image_start_token_id",
//  "image_end_token_id", "segments": [{"type": "text", "ids": [...]},
//  {"type": "image_start"}, {"type": "visual", "count": n}, {"type": "image_end"}]}
SequenceSpec parse_sequence_spec(std::string_view text);

// Serialized form written to disk: two-space indent plus trailing newline.
std::string to_text(const Json& doc);

}  // namespace g2tr::cli
