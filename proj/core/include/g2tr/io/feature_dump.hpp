#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "g2tr/pipeline.hpp"

// G2FD feature dump, version 1. Every field is little-endian.
//
//   offset  size  field
//   0       4     magic "G2FD"
//   4       4     version (u32, = 1)
//   8       4     H_u     (u32, token grid rows)
//   12      4     W_u     (u32, token grid cols)
//   16      4     d_u     (u32, token dim)
//   20      4     H_z     (u32, latent grid rows)
//   24      4     W_z     (u32, latent grid cols)
//   28      4     d_z     (u32, latent dim)
//   32      4     n_text  (u32, text embedding count, may be 0)
//   36      4     has_attn (u32, 0 or 1)
//   40      4     has_proj (u32, 0 or 1)
//   44            tokens      H_u*W_u*d_u  f32
//                 latents     H_z*W_z*d_z  f32
//                 text        n_text*d_u   f32   (absent when n_text = 0)
//                 attention   H_u*W_u      f32   (only if has_attn)
//                 projection  d_z*d_u      f32   (only if has_proj, row-major)
//
// The file length must equal the header-implied length exactly.

namespace g2tr::io {

using FeatureDump = ReductionInputs;

inline constexpr std::uint32_t kDumpVersion = 1;
inline constexpr std::size_t kDumpHeaderBytes = 44;

std::vector<std::uint8_t> encode_dump(const FeatureDump& dump);

// Throws BadMagic, BadVersion, BadHeader, TruncatedFile or LengthMismatch.
FeatureDump decode_dump(std::span<const std::uint8_t> bytes);

FeatureDump read_dump(const std::filesystem::path& path);
void write_dump(const std::filesystem::path& path, const FeatureDump& dump);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// Binary PGM (P5), 255 at retained positions, 0 elsewhere.
std::vector<std::uint8_t> encode_mask(std::span<const std::size_t> retained, std::size_t rows, std::size_t cols);
void write_mask(const std::filesystem::path& path, std::span<const std::size_t> retained, std::size_t rows,
                std::size_t cols);

// Row-major f32 little-endian bytes.
std::vector<std::uint8_t> encode_f32le(std::span<const float> values);

}  // namespace g2tr::io
