#include "g2tr/pipeline.hpp"

namespace g2tr {

ReductionResult reduce(const ReductionInputs& inputs, const ReductionConfig& config) {
    const auto& tokens = inputs.tokens;

    ReductionResult r;
    r.config = config;
    r.budget = compute_budget(config.rho, tokens.size(), config.k_min);
    // anchors are only needed for scoring under the latent strategy, but the
    // balanced selection always groups by anchor cell
    r.anchors = pool_latents(inputs.latents);
    if (config.strategy == Strategy::Latent) r.anchors = align_anchors(r.anchors, inputs.projection, tokens.dim());

    r.scores = score_tokens(config.strategy, tokens, r.anchors, inputs.side, config.seed);

    const GridShape token_shape{tokens.height(), tokens.width()};
    const GridShape anchor_shape{r.anchors.height(), r.anchors.width()};
    r.retained = balanced_select(r.scores, per_anchor_best(r.scores, token_shape, anchor_shape), r.budget);
    r.assignment = assign_nearest(tokens, r.retained);
    r.compressed = merge(tokens, r.retained, r.assignment, config.lambda);
    r.report = merge_error(tokens, r.compressed, r.assignment);
    r.report.surrogate = surrogate_score(r.scores, r.retained);
    return r;
}

SequenceSpec default_layout(std::size_t n_visual) {
    SequenceSpec spec;
    spec.segments = {Segment::image_start(), Segment::visual(n_visual), Segment::image_end()};
    spec.pad_token_id = 0;
    spec.img_context_token_id = 1;
    spec.image_start_token_id = 2;
    spec.image_end_token_id = 3;
    return spec;
}

}  // namespace g2tr
