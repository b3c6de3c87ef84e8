#include "g2tr/grid.hpp"

#include <algorithm>
#include <string>

#include "g2tr/error.hpp"

namespace g2tr {

FeatureGrid::FeatureGrid(std::size_t height, std::size_t width, std::size_t dim, std::vector<float> data)
    : height_(height), width_(width), dim_(dim), data_(std::move(data)) {
    if (height == 0 || width == 0 || dim == 0) {
        throw Error(ErrorCode::DimensionMismatch, "grid extents must be >= 1, got " + std::to_string(height) +
                                                      "x" + std::to_string(width) + "x" + std::to_string(dim));
    }
    if (data_.size() != height * width * dim) {
        throw Error(ErrorCode::DimensionMismatch, "grid data holds " + std::to_string(data_.size()) +
                                                      " floats, expected " + std::to_string(height * width * dim));
    }
}

FeatureGrid::FeatureGrid(std::size_t height, std::size_t width, std::size_t dim)
    : FeatureGrid(height, width, dim, std::vector<float>(height * width * dim, 0.0f)) {}

ProjectionMatrix::ProjectionMatrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0 || data_.size() != rows * cols) {
        throw Error(ErrorCode::DimensionMismatch, "projection " + std::to_string(rows) + "x" +
                                                      std::to_string(cols) + " does not match " +
                                                      std::to_string(data_.size()) + " floats");
    }
}

AnchorGrid pool_latents(const LatentGrid& latents) {
    const std::size_t out_h = (latents.height() + 1) / 2;
    const std::size_t out_w = (latents.width() + 1) / 2;
    const std::size_t dim = latents.dim();
    AnchorGrid anchors(out_h, out_w, dim);
    std::vector<double> acc(dim);

    for (std::size_t r = 0; r < out_h; ++r) {
        for (std::size_t c = 0; c < out_w; ++c) {
            std::fill(acc.begin(), acc.end(), 0.0);
            std::size_t cells = 0;
            for (std::size_t dr = 0; dr < 2; ++dr) {
                const std::size_t src_r = 2 * r + dr;
                if (src_r >= latents.height()) break;
                for (std::size_t dc = 0; dc < 2; ++dc) {
                    const std::size_t src_c = 2 * c + dc;
                    if (src_c >= latents.width()) break;
                    const auto v = latents.at(src_r, src_c);
                    for (std::size_t k = 0; k < dim; ++k) acc[k] += v[k];
                    ++cells;
                }
            }
            auto out = anchors.at(r * out_w + c);
            for (std::size_t k = 0; k < dim; ++k) out[k] = static_cast<float>(acc[k] / static_cast<double>(cells));
        }
    }
    return anchors;
}

AnchorGrid align_anchors(const AnchorGrid& anchors, const std::optional<ProjectionMatrix>& proj,
                         std::size_t token_dim) {
    if (!proj) {
        if (anchors.dim() != token_dim) {
            throw Error(ErrorCode::DimensionMismatch,
                        "anchor dim " + std::to_string(anchors.dim()) + " differs from token dim " +
                            std::to_string(token_dim) + " and no projection was supplied");
        }
        return anchors;
    }
    if (proj->rows() != anchors.dim() || proj->cols() != token_dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "projection is " + std::to_string(proj->rows()) + "x" + std::to_string(proj->cols()) +
                        ", expected " + std::to_string(anchors.dim()) + "x" + std::to_string(token_dim));
    }

    AnchorGrid out(anchors.height(), anchors.width(), token_dim);
    std::vector<double> acc(token_dim);
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const auto in = anchors.at(i);
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t r = 0; r < proj->rows(); ++r) {
            const double a = in[r];
            for (std::size_t c = 0; c < token_dim; ++c) acc[c] += a * (*proj)(r, c);
        }
        auto dst = out.at(i);
        for (std::size_t c = 0; c < token_dim; ++c) dst[c] = static_cast<float>(acc[c]);
    }
    return out;
}

std::vector<std::size_t> anchor_index_map(std::size_t token_rows, std::size_t token_cols,
                                          std::size_t anchor_rows, std::size_t anchor_cols) {
    std::vector<std::size_t> map(token_rows * token_cols);
    for (std::size_t p = 0; p < token_rows; ++p) {
        for (std::size_t q = 0; q < token_cols; ++q) {
            const auto c = map_token_to_anchor(p, q, token_rows, token_cols, anchor_rows, anchor_cols);
            map[p * token_cols + q] = c.row * anchor_cols + c.col;
        }
    }
    return map;
}

}  // namespace g2tr
