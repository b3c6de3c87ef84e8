#pragma once

#include <cstdint>
#include <optional>

#include "g2tr/grid.hpp"
#include "g2tr/guidance.hpp"
#include "g2tr/layout.hpp"
#include "g2tr/merging.hpp"
#include "g2tr/selection.hpp"

namespace g2tr {

struct ReductionConfig {
    double rho = 0.5;
    std::size_t k_min = 1;
    double lambda = 1.0;
    Strategy strategy = Strategy::Latent;
    std::uint64_t seed = 0;
};

struct ReductionInputs {
    TokenGrid tokens;
    LatentGrid latents;
    SideInputs side;
    std::optional<ProjectionMatrix> projection;
};

struct ReductionResult {
    ReductionConfig config;
    AnchorGrid anchors;
    ScoreVector scores;
    Budget budget;
    RetainedSet retained;
    MergeAssignment assignment;
    CompressedTokens compressed;
    MergeReport report;
};

// pool -> align -> score -> budget -> select -> merge, plus the merge report.
ReductionResult reduce(const ReductionInputs& inputs, const ReductionConfig& config);

// [ImageStart, VisualSpan(n_visual), ImageEnd] with ids pad=0, context=1,
// start=2, end=3. Used when the host does not supply a layout.
SequenceSpec default_layout(std::size_t n_visual);

}  // namespace g2tr
