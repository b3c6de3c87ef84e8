#include "g2tr/io/feature_dump.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <system_error>

#include "g2tr/error.hpp"

namespace g2tr::io {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'G', '2', 'F', 'D'};

class Writer {
public:
    void u32(std::uint32_t v) {
        for (int shift = 0; shift < 32; shift += 8) bytes_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void floats(std::span<const float> values) {
        for (float v : values) f32(v);
    }
    void raw(std::span<const std::uint8_t> b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }

    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes_[pos_ + k]) << (8 * k);
        pos_ += 4;
        return v;
    }
    std::vector<float> floats(std::size_t n) {
        std::vector<float> out(n);
        for (auto& f : out) f = std::bit_cast<float>(u32());
        return out;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::uint32_t narrow(std::size_t v, const char* field) {
    if (v > 0xFFFFFFFFu) throw Error(ErrorCode::InvalidConfig, std::string(field) + " does not fit in 32 bits");
    return static_cast<std::uint32_t>(v);
}

[[noreturn]] void truncated(unsigned __int128 expected, std::size_t actual, const char* what) {
    throw Error(ErrorCode::TruncatedFile, std::string(what) + ": expected " +
                                              std::to_string(static_cast<unsigned long long>(expected)) +
                                              " bytes, got " + std::to_string(actual));
}

struct Header {
    std::uint32_t token_rows, token_cols, token_dim;
    std::uint32_t latent_rows, latent_cols, latent_dim;
    std::uint32_t n_text, has_attn, has_proj;
};

}  // namespace

std::vector<std::uint8_t> encode_dump(const FeatureDump& dump) {
    const auto& u = dump.tokens;
    const auto& z = dump.latents;
    const std::size_t text_floats = dump.side.text_embeddings ? dump.side.text_embeddings->size() : 0;
    if (text_floats % u.dim() != 0) {
        throw Error(ErrorCode::DimensionMismatch, "text embeddings are not a whole number of token-dim vectors");
    }
    if (dump.side.attention_importance && dump.side.attention_importance->size() != u.size()) {
        throw Error(ErrorCode::DimensionMismatch, "attention importance length differs from token count");
    }
    if (dump.projection && (dump.projection->rows() != z.dim() || dump.projection->cols() != u.dim())) {
        throw Error(ErrorCode::DimensionMismatch, "projection must be d_z x d_u");
    }

    Writer w;
    w.raw(kMagic);
    w.u32(kDumpVersion);
    w.u32(narrow(u.height(), "H_u"));
    w.u32(narrow(u.width(), "W_u"));
    w.u32(narrow(u.dim(), "d_u"));
    w.u32(narrow(z.height(), "H_z"));
    w.u32(narrow(z.width(), "W_z"));
    w.u32(narrow(z.dim(), "d_z"));
    w.u32(narrow(text_floats / u.dim(), "n_text"));
    w.u32(dump.side.attention_importance ? 1 : 0);
    w.u32(dump.projection ? 1 : 0);
    w.floats(u.data());
    w.floats(z.data());
    if (text_floats > 0) w.floats(*dump.side.text_embeddings);
    if (dump.side.attention_importance) w.floats(*dump.side.attention_importance);
    if (dump.projection) w.floats(dump.projection->data());
    return w.take();
}

FeatureDump decode_dump(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kMagic.size()) truncated(kDumpHeaderBytes, bytes.size(), "header");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        throw Error(ErrorCode::BadMagic, "magic must be \"G2FD\"");
    }
    if (bytes.size() < 8) truncated(kDumpHeaderBytes, bytes.size(), "header");
    Reader r(bytes.subspan(4));
    const std::uint32_t version = r.u32();
    if (version != kDumpVersion) {
        throw Error(ErrorCode::BadVersion, "version is " + std::to_string(version) + ", expected " +
                                               std::to_string(kDumpVersion));
    }
    if (bytes.size() < kDumpHeaderBytes) truncated(kDumpHeaderBytes, bytes.size(), "header");

    Header h{r.u32(), r.u32(), r.u32(), r.u32(), r.u32(), r.u32(), r.u32(), r.u32(), r.u32()};
    const std::pair<const char*, std::uint32_t> extents[] = {
        {"H_u", h.token_rows},   {"W_u", h.token_cols},   {"d_u", h.token_dim},
        {"H_z", h.latent_rows},  {"W_z", h.latent_cols},  {"d_z", h.latent_dim},
    };
    for (const auto& [field, value] : extents) {
        if (value == 0) throw Error(ErrorCode::BadHeader, std::string(field) + " must be >= 1");
    }
    if (h.has_attn > 1) throw Error(ErrorCode::BadHeader, "has_attn must be 0 or 1, got " + std::to_string(h.has_attn));
    if (h.has_proj > 1) throw Error(ErrorCode::BadHeader, "has_proj must be 0 or 1, got " + std::to_string(h.has_proj));

    using Wide = unsigned __int128;
    const Wide n_tokens = Wide{h.token_rows} * h.token_cols;
    const Wide token_floats = n_tokens * h.token_dim;
    const Wide latent_floats = Wide{h.latent_rows} * h.latent_cols * h.latent_dim;
    const Wide text_floats = Wide{h.n_text} * h.token_dim;
    const Wide attn_floats = h.has_attn ? n_tokens : 0;
    const Wide proj_floats = h.has_proj ? Wide{h.latent_dim} * h.token_dim : 0;
    const Wide expected =
        kDumpHeaderBytes + 4 * (token_floats + latent_floats + text_floats + attn_floats + proj_floats);
    if (bytes.size() < expected) truncated(expected, bytes.size(), "payload");
    if (bytes.size() > expected) {
        throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(static_cast<unsigned long long>(expected)) +
                                                   " bytes, got " + std::to_string(bytes.size()));
    }

    Reader payload(bytes.subspan(kDumpHeaderBytes));
    FeatureDump dump;
    dump.tokens = TokenGrid(h.token_rows, h.token_cols, h.token_dim,
                            payload.floats(static_cast<std::size_t>(token_floats)));
    dump.latents = LatentGrid(h.latent_rows, h.latent_cols, h.latent_dim,
                              payload.floats(static_cast<std::size_t>(latent_floats)));
    if (h.n_text > 0) dump.side.text_embeddings = payload.floats(static_cast<std::size_t>(text_floats));
    if (h.has_attn) dump.side.attention_importance = payload.floats(static_cast<std::size_t>(attn_floats));
    if (h.has_proj) {
        dump.projection = ProjectionMatrix(h.latent_dim, h.token_dim, payload.floats(static_cast<std::size_t>(proj_floats)));
    }
    return dump;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw Error(ErrorCode::Io, "failed reading " + path.string());
    return bytes;
}

FeatureDump read_dump(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_dump(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.message());
    }
}

void write_dump(const std::filesystem::path& path, const FeatureDump& dump) {
    write_file_atomic(path, encode_dump(dump));
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot create " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error(ErrorCode::Io, "failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::Io, "cannot move " + tmp.string() + " to " + path.string());
    }
}

std::vector<std::uint8_t> encode_mask(std::span<const std::size_t> retained, std::size_t rows, std::size_t cols) {
    const std::string header = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const std::size_t offset = out.size();
    out.resize(offset + rows * cols, 0);
    for (std::size_t i : retained) {
        if (i >= rows * cols) throw Error(ErrorCode::InvalidConfig, "retained index outside the mask");
        out[offset + i] = 255;
    }
    return out;
}

void write_mask(const std::filesystem::path& path, std::span<const std::size_t> retained, std::size_t rows,
                std::size_t cols) {
    write_file_atomic(path, encode_mask(retained, rows, cols));
}

std::vector<std::uint8_t> encode_f32le(std::span<const float> values) {
    Writer w;
    w.floats(values);
    return w.take();
}

}  // namespace g2tr::io
