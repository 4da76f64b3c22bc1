#ifndef TEXSTEGO_TEXTURE_CODEC_HPP
#define TEXSTEGO_TEXTURE_CODEC_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "image.hpp"

namespace texstego {

/// Texture columns folded into three square planes (red, green, blue).
struct ChannelPlaneSet {
    std::int64_t side = 0;
    std::array<Matrix, kChannels> planes;
    std::int64_t pad_count = 0;
    std::int64_t original_rows = 0;
};

/// Smallest integer s with s*s >= n.
inline std::int64_t square_side(std::int64_t n) {
    if (n < 1) {
        throw Error(Errc::dimension, "square_side needs a positive count");
    }
    // s * s < n, written so that it cannot overflow near INT64_MAX.
    const auto below = [n](std::int64_t s) { return s < n / s || (s == n / s && n % s != 0); };
    auto s = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::sqrt(static_cast<double>(n))));
    while (below(s)) {
        ++s;
    }
    while (s > 1 && !below(s - 1)) {
        --s;
    }
    return s;
}

/**
 * Pad each column of an N x 3 texture with zeros up to side^2 entries and
 * reshape column-major into a side x side plane, so plane(r, c) holds the
 * column value at index c * side + r. Non-finite values become zero.
 */
inline ChannelPlaneSet pack_texture(const Matrix& texture) {
    if (texture.cols() != static_cast<Eigen::Index>(kChannels)) {
        throw Error(Errc::shape, "texture must have exactly 3 columns, got " +
                                     std::to_string(texture.cols()));
    }
    if (texture.rows() < 1) {
        throw Error(Errc::shape, "texture must have at least one row");
    }
    ChannelPlaneSet out;
    out.original_rows = texture.rows();
    out.side = square_side(out.original_rows);
    out.pad_count = out.side * out.side - out.original_rows;
    for (std::size_t ch = 0; ch < kChannels; ++ch) {
        Matrix plane = Matrix::Zero(out.side, out.side);
        double* dst = plane.data();  // column-major storage == reshape order
        const auto col = texture.col(static_cast<Eigen::Index>(ch));
        for (Eigen::Index i = 0; i < texture.rows(); ++i) {
            const double v = col(i);
            dst[i] = std::isfinite(v) ? v : 0.0;
        }
        out.planes[ch] = std::move(plane);
    }
    return out;
}

inline Matrix unpack_texture(const ChannelPlaneSet& p) {
    if (p.side < 1 || p.original_rows < 1 || p.side * p.side < p.original_rows) {
        throw Error(Errc::key, "plane metadata inconsistent: side " + std::to_string(p.side) +
                                   " cannot hold " + std::to_string(p.original_rows) + " rows");
    }
    if (p.pad_count != p.side * p.side - p.original_rows) {
        throw Error(Errc::key, "pad count does not match side and row count");
    }
    Matrix out(p.original_rows, static_cast<Eigen::Index>(kChannels));
    for (std::size_t ch = 0; ch < kChannels; ++ch) {
        const Matrix& plane = p.planes[ch];
        if (plane.rows() != p.side || plane.cols() != p.side) {
            throw Error(Errc::shape, "plane size does not match recorded side");
        }
        out.col(static_cast<Eigen::Index>(ch)) =
            Eigen::Map<const Vector>(plane.data(), p.original_rows);
    }
    return out;
}

}  // namespace texstego

#endif  // TEXSTEGO_TEXTURE_CODEC_HPP
