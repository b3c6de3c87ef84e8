#include "g2tr/layout.hpp"

#include <algorithm>
#include <string>

#include "g2tr/error.hpp"

namespace g2tr {

std::size_t Segment::length() const noexcept {
    switch (kind) {
        case SegmentKind::Text: return ids.size();
        case SegmentKind::VisualSpan: return count;
        case SegmentKind::ImageStart:
        case SegmentKind::ImageEnd: return 1;
    }
    return 0;
}

void validate(const SequenceSpec& spec) {
    const auto& segs = spec.segments;
    if (segs.empty()) throw Error(ErrorCode::MalformedSpec, "sequence has no segments");
    for (std::size_t s = 0; s < segs.size(); ++s) {
        const auto where = "segment " + std::to_string(s);
        switch (segs[s].kind) {
            case SegmentKind::Text:
                if (segs[s].ids.empty()) throw Error(ErrorCode::MalformedSpec, where + ": text segment is empty");
                break;
            case SegmentKind::VisualSpan:
                if (segs[s].count == 0) throw Error(ErrorCode::MalformedSpec, where + ": visual span is empty");
                if (s == 0 || segs[s - 1].kind != SegmentKind::ImageStart) {
                    throw Error(ErrorCode::MalformedSpec, where + ": visual span not preceded by image start");
                }
                if (s + 1 >= segs.size() || segs[s + 1].kind != SegmentKind::ImageEnd) {
                    throw Error(ErrorCode::MalformedSpec, where + ": visual span not followed by image end");
                }
                break;
            case SegmentKind::ImageStart:
                if (s + 1 >= segs.size() || segs[s + 1].kind != SegmentKind::VisualSpan) {
                    throw Error(ErrorCode::MalformedSpec, where + ": image start without a visual span");
                }
                break;
            case SegmentKind::ImageEnd:
                if (s == 0 || segs[s - 1].kind != SegmentKind::VisualSpan) {
                    throw Error(ErrorCode::MalformedSpec, where + ": image end without a visual span");
                }
                break;
        }
    }
}

std::size_t visual_span_count(const SequenceSpec& spec) {
    return static_cast<std::size_t>(std::count_if(spec.segments.begin(), spec.segments.end(),
                                                  [](const Segment& s) { return s.kind == SegmentKind::VisualSpan; }));
}

RebuiltSequence scaffold(const SequenceSpec& spec) {
    validate(spec);
    RebuiltSequence out;
    out.spec = spec;
    for (const auto& seg : spec.segments) {
        switch (seg.kind) {
            case SegmentKind::Text: out.input_ids.insert(out.input_ids.end(), seg.ids.begin(), seg.ids.end()); break;
            case SegmentKind::ImageStart: out.input_ids.push_back(spec.image_start_token_id); break;
            case SegmentKind::VisualSpan: out.input_ids.insert(out.input_ids.end(), seg.count, spec.img_context_token_id); break;
            case SegmentKind::ImageEnd: out.input_ids.push_back(spec.image_end_token_id); break;
        }
    }
    out.real_length = out.input_ids.size();
    out.attention_mask.assign(out.real_length, 1);
    out.position_ids.resize(out.real_length);
    for (std::size_t k = 0; k < out.real_length; ++k) out.position_ids[k] = static_cast<TokenId>(k);
    return out;
}

RebuiltSequence rebuild(const SequenceSpec& spec, const CompressedTokens& compressed) {
    return rebuild(spec, std::span<const CompressedTokens>(&compressed, 1));
}

RebuiltSequence rebuild(const SequenceSpec& spec, std::span<const CompressedTokens> per_image) {
    validate(spec);
    if (visual_span_count(spec) != per_image.size()) {
        throw Error(ErrorCode::MalformedSpec, "sequence has " + std::to_string(visual_span_count(spec)) +
                                                  " visual spans but " + std::to_string(per_image.size()) +
                                                  " compressed images were supplied");
    }

    SequenceSpec reduced = spec;
    std::size_t image = 0;
    std::size_t dim = per_image.empty() ? 0 : per_image.front().dim;
    std::vector<float> features;
    for (auto& seg : reduced.segments) {
        if (seg.kind != SegmentKind::VisualSpan) continue;
        const auto& c = per_image[image];
        if (c.count() == 0 || c.count() > seg.count) {
            throw Error(ErrorCode::MalformedSpec, "image " + std::to_string(image) + " keeps " +
                                                      std::to_string(c.count()) + " tokens of a span of " +
                                                      std::to_string(seg.count));
        }
        if (c.dim != dim) throw Error(ErrorCode::DimensionMismatch, "images carry different feature dims");
        seg.count = c.count();
        features.insert(features.end(), c.features.begin(), c.features.end());
        ++image;
    }

    auto out = scaffold(reduced);
    out.visual_features = std::move(features);
    out.feature_dim = dim;
    return out;
}

RebuiltBatch pad_batch(std::vector<RebuiltSequence> sequences) {
    if (sequences.empty()) throw Error(ErrorCode::InvalidConfig, "cannot pad an empty batch");
    RebuiltBatch batch;
    for (const auto& s : sequences) batch.padded_length = std::max(batch.padded_length, s.real_length);
    for (auto& s : sequences) {
        // drop padding from any earlier batching
        s.input_ids.resize(s.real_length);
        s.attention_mask.resize(s.real_length);
        s.position_ids.resize(s.real_length);
        const std::size_t pads = batch.padded_length - s.real_length;
        s.input_ids.insert(s.input_ids.end(), pads, s.spec.pad_token_id);
        s.attention_mask.insert(s.attention_mask.end(), pads, 0);
        s.position_ids.insert(s.position_ids.end(), pads, 0);
    }
    batch.sequences = std::move(sequences);
    return batch;
}

}  // namespace g2tr
