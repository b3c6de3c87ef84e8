#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "g2tr/merging.hpp"

namespace g2tr {

using TokenId = std::int64_t;

enum class SegmentKind { Text, ImageStart, VisualSpan, ImageEnd };

struct Segment {
    SegmentKind kind = SegmentKind::Text;
    // token ids of a Text segment
    std::vector<TokenId> ids;
    // placeholder count of a VisualSpan
    std::size_t count = 0;

    static Segment text(std::vector<TokenId> ids) { return {SegmentKind::Text, std::move(ids), 0}; }
    static Segment image_start() { return {SegmentKind::ImageStart, {}, 0}; }
    static Segment visual(std::size_t n) { return {SegmentKind::VisualSpan, {}, n}; }
    static Segment image_end() { return {SegmentKind::ImageEnd, {}, 0}; }

    // number of sequence slots this segment occupies
    std::size_t length() const noexcept;

    friend bool operator==(const Segment&, const Segment&) = default;
};

// Host-model input layout around one or more image spans.
struct SequenceSpec {
    std::vector<Segment> segments;
    TokenId pad_token_id = 0;
    TokenId img_context_token_id = 0;
    TokenId image_start_token_id = 0;
    TokenId image_end_token_id = 0;

    friend bool operator==(const SequenceSpec&, const SequenceSpec&) = default;
};

struct RebuiltSequence {
    SequenceSpec spec;
    std::vector<TokenId> input_ids;
    std::vector<std::uint8_t> attention_mask;
    std::vector<TokenId> position_ids;
    // count of non-pad slots
    std::size_t real_length = 0;
    // merged features for every visual placeholder in sequence order
    std::vector<float> visual_features;
    std::size_t feature_dim = 0;

    friend bool operator==(const RebuiltSequence&, const RebuiltSequence&) = default;
};

struct RebuiltBatch {
    std::vector<RebuiltSequence> sequences;
    std::size_t padded_length = 0;
};

// Throws MalformedSpec unless every VisualSpan sits directly between an
// ImageStart and an ImageEnd and all counts are >= 1.
void validate(const SequenceSpec& spec);

// Number of VisualSpan segments.
std::size_t visual_span_count(const SequenceSpec& spec);

// Id/mask/position scaffold of an unmodified spec (no features attached).
RebuiltSequence scaffold(const SequenceSpec& spec);

// Replaces the single VisualSpan with compressed.count() placeholders.
RebuiltSequence rebuild(const SequenceSpec& spec, const CompressedTokens& compressed);

// One CompressedTokens per VisualSpan, in sequence order.
RebuiltSequence rebuild(const SequenceSpec& spec, std::span<const CompressedTokens> per_image);

// Right-pads every sequence to the longest real length.
RebuiltBatch pad_batch(std::vector<RebuiltSequence> sequences);

}  // namespace g2tr
