#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace g2tr {

// Row-major H x W grid of dim-length float vectors. Cell (p, q) lives at
// flat index p * width + q.
class FeatureGrid {
public:
    FeatureGrid() = default;

    // Throws DimensionMismatch unless every extent is >= 1 and
    // data.size() == height * width * dim.
    FeatureGrid(std::size_t height, std::size_t width, std::size_t dim, std::vector<float> data);

    // Zero-filled grid.
    FeatureGrid(std::size_t height, std::size_t width, std::size_t dim);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return height_ * width_; }

    std::span<const float> at(std::size_t index) const noexcept {
        return {data_.data() + index * dim_, dim_};
    }
    std::span<float> at(std::size_t index) noexcept { return {data_.data() + index * dim_, dim_}; }

    std::span<const float> at(std::size_t row, std::size_t col) const noexcept {
        return at(row * width_ + col);
    }

    const std::vector<float>& data() const noexcept { return data_; }

    friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t dim_ = 0;
    std::vector<float> data_;
};

// Understanding-encoder output U.
struct TokenGrid : FeatureGrid {
    using FeatureGrid::FeatureGrid;
};

// Raw generation-side VAE latents Z.
struct LatentGrid : FeatureGrid {
    using FeatureGrid::FeatureGrid;
};

// 2x2-pooled latents, optionally projected to the token dimension.
struct AnchorGrid : FeatureGrid {
    using FeatureGrid::FeatureGrid;
};

struct AnchorCoord {
    std::size_t row = 0;
    std::size_t col = 0;

    friend auto operator<=>(const AnchorCoord&, const AnchorCoord&) = default;
};

// Linear map applied as a row vector times matrix: rows = input dim, cols = output dim.
class ProjectionMatrix {
public:
    ProjectionMatrix(std::size_t rows, std::size_t cols, std::vector<float> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    float operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
    const std::vector<float>& data() const noexcept { return data_; }

    friend bool operator==(const ProjectionMatrix&, const ProjectionMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<float> data_;
};

// Averages non-overlapping 2x2 windows. Edge windows of odd-sized grids
// average only the cells that exist.
AnchorGrid pool_latents(const LatentGrid& latents);

// Projects every anchor into the token feature space. Without a projection
// the anchors must already have dim == token_dim.
AnchorGrid align_anchors(const AnchorGrid& anchors, const std::optional<ProjectionMatrix>& proj,
                         std::size_t token_dim);

// Anchor cell covering token (p, q): (floor(p*H_g/H_u), floor(q*W_g/W_u)).
constexpr AnchorCoord map_token_to_anchor(std::size_t p, std::size_t q, std::size_t token_rows,
                                          std::size_t token_cols, std::size_t anchor_rows,
                                          std::size_t anchor_cols) noexcept {
    return {p * anchor_rows / token_rows, q * anchor_cols / token_cols};
}

// Flat anchor index for every token, in token order.
std::vector<std::size_t> anchor_index_map(std::size_t token_rows, std::size_t token_cols,
                                          std::size_t anchor_rows, std::size_t anchor_cols);

}  // namespace g2tr
