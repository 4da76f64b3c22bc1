#ifndef TEXSTEGO_STEGO_HPP
#define TEXSTEGO_STEGO_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "svd.hpp"
#include "texture_codec.hpp"
#include "wavelet.hpp"

namespace texstego {

/**
 * How extraction rebuilds each texture plane from the recovered singular
 * values.
 *
 * `key_based` uses the texture's own singular vectors stored in the key and
 * recovers the payload exactly when the embedding kept the diagonal sorted.
 * `literal` reuses the stego subband's singular vectors, which approximate
 * the cover's vectors rather than the texture's, so it only yields an image
 * with the texture's spectrum, not the texture itself.
 */
enum class ExtractionMode : std::uint8_t { literal = 0, key_based = 1 };

inline std::string_view to_string(ExtractionMode m) {
    return m == ExtractionMode::literal ? "literal" : "key";
}

inline constexpr double kDefaultAlpha = 0.1;

/// Side information for one channel.
struct ChannelKey {
    Vector cover_sigma;  ///< singular values of the cover's CD plane
    Matrix texture_u;
    Matrix texture_v;
};

struct StegoKey {
    double alpha = kDefaultAlpha;
    std::int64_t side = 0;
    std::int64_t pad_count = 0;
    double peak = 255.0;
    std::array<ChannelKey, kChannels> channels;
    ExtractionMode mode = ExtractionMode::key_based;
    WaveletFamily family = WaveletFamily::haar;

    std::int64_t original_rows() const { return side * side - pad_count; }

    /// Throws Errc::key when a field is missing or breaks an invariant.
    void validate(double orthogonality_tol = 1e-9) const {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) {
            throw Error(Errc::key, "key: embedding strength must be positive");
        }
        if (side < 1 || pad_count < 0 || pad_count >= side * side) {
            throw Error(Errc::key, "key: invalid side/pad metadata");
        }
        if (!(peak > 0.0)) {
            throw Error(Errc::key, "key: peak must be positive");
        }
        for (std::size_t c = 0; c < kChannels; ++c) {
            const auto& ch = channels[c];
            const std::string tag = "key channel " + std::to_string(c) + ": ";
            if (ch.cover_sigma.size() != side || ch.texture_u.rows() != side ||
                ch.texture_u.cols() != side || ch.texture_v.rows() != side ||
                ch.texture_v.cols() != side) {
                throw Error(Errc::key, tag + "missing or mis-sized fields");
            }
            for (Eigen::Index i = 0; i < side; ++i) {
                if (ch.cover_sigma(i) < 0.0 || (i > 0 && ch.cover_sigma(i) > ch.cover_sigma(i - 1))) {
                    throw Error(Errc::key, tag + "cover singular values not sorted non-negative");
                }
            }
            if (orthogonality_defect(ch.texture_u) > orthogonality_tol ||
                orthogonality_defect(ch.texture_v) > orthogonality_tol) {
                throw Error(Errc::key, tag + "texture singular vectors not orthogonal");
            }
        }
    }
};

struct EmbedResult {
    FloatImage stego;
    StegoKey key;
    double psnr_db = 0.0;
    std::vector<std::string> warnings;
};

/// Smallest gap between consecutive entries of a non-increasing vector.
inline double min_gap(const Vector& sigma) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < sigma.size(); ++i) {
        gap = std::min(gap, sigma(i - 1) - sigma(i));
    }
    return gap;
}

/**
 * alpha * max(payload) < min_gap(cover) / 2: the payload shifts no cover
 * singular value past half the distance to its neighbour, so the stego's
 * singular vectors stay those of the cover even after small perturbations.
 * Key-based extraction of a lossless stego does not depend on it; the
 * literal mode and any lossy round trip do.
 */
inline bool gap_dominant(const Vector& cover_sigma, const Vector& texture_sigma, double alpha) {
    const double largest = texture_sigma.size() ? texture_sigma.maxCoeff() : 0.0;
    return alpha * largest < 0.5 * min_gap(cover_sigma);
}

/**
 * Bilinear resample to (2*side) x (2*side), sampling at pixel centres with
 * edge clamping. A same-size resample is the identity.
 */
inline FloatImage prepare_cover(const FloatImage& img, std::int64_t side) {
    if (side < 1) {
        throw Error(Errc::parameter, "prepare_cover: side must be >= 1");
    }
    if (img.empty()) {
        throw Error(Errc::dimension, "prepare_cover: degenerate source image");
    }
    const Eigen::Index out_n = 2 * side;
    if (img.height() == out_n && img.width() == out_n) {
        return img;
    }
    struct Tap {
        Eigen::Index lo, hi;
        double frac;
    };
    auto taps = [](Eigen::Index src_n, Eigen::Index dst_n) {
        std::vector<Tap> t(static_cast<std::size_t>(dst_n));
        const double scale = static_cast<double>(src_n) / static_cast<double>(dst_n);
        for (Eigen::Index i = 0; i < dst_n; ++i) {
            double pos = (static_cast<double>(i) + 0.5) * scale - 0.5;
            pos = std::clamp(pos, 0.0, static_cast<double>(src_n - 1));
            const auto lo = static_cast<Eigen::Index>(std::floor(pos));
            const auto hi = std::min(lo + 1, src_n - 1);
            t[static_cast<std::size_t>(i)] = {lo, hi, pos - static_cast<double>(lo)};
        }
        return t;
    };
    const auto rt = taps(img.height(), out_n);
    const auto ct = taps(img.width(), out_n);
    FloatImage out(out_n, out_n, img.peak());
    for (std::size_t ch = 0; ch < kChannels; ++ch) {
        const Matrix& src = img.channel(ch);
        Matrix& dst = out.channel(ch);
        for (Eigen::Index c = 0; c < out_n; ++c) {
            const auto& cx = ct[static_cast<std::size_t>(c)];
            for (Eigen::Index r = 0; r < out_n; ++r) {
                const auto& ry = rt[static_cast<std::size_t>(r)];
                const double top = src(ry.lo, cx.lo) + cx.frac * (src(ry.lo, cx.hi) - src(ry.lo, cx.lo));
                const double bot = src(ry.hi, cx.lo) + cx.frac * (src(ry.hi, cx.hi) - src(ry.hi, cx.lo));
                dst(r, c) = top + ry.frac * (bot - top);
            }
        }
    }
    return out;
}

/**
 * Hide an N x 3 texture in the diagonal-detail subband of `cover`.
 *
 * Per channel: CD_new = Uc * diag(Sc + alpha * St) * Vc^T, where Sc are the
 * cover CD singular values and St the singular values of the packed texture
 * plane. The cover must already be (2*side) x (2*side); see prepare_cover.
 */
inline EmbedResult embed(const FloatImage& cover, const Matrix& texture, double alpha = kDefaultAlpha,
                         ExtractionMode mode = ExtractionMode::key_based,
                         WaveletFamily family = WaveletFamily::haar) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error(Errc::parameter, "embedding strength alpha must be positive");
    }
    const ChannelPlaneSet packed = pack_texture(texture);
    if (cover.height() != 2 * packed.side || cover.width() != 2 * packed.side) {
        throw Error(Errc::shape, "cover is " + std::to_string(cover.height()) + "x" +
                                     std::to_string(cover.width()) + " but texture needs " +
                                     std::to_string(2 * packed.side) + "x" +
                                     std::to_string(2 * packed.side));
    }
    SubbandSet bands = dwt2(cover, family);

    EmbedResult result;
    StegoKey& key = result.key;
    key.alpha = alpha;
    key.side = packed.side;
    key.pad_count = packed.pad_count;
    key.peak = cover.peak();
    key.mode = mode;
    key.family = family;

    static constexpr std::array<const char*, kChannels> names{"red", "green", "blue"};
    for (std::size_t c = 0; c < kChannels; ++c) {
        const SvdTriple cov = svd(bands.cd[c]);
        const SvdTriple tex = svd(packed.planes[c]);
        if (!gap_dominant(cov.sigma, tex.sigma, alpha)) {
            result.warnings.push_back(std::string("gap-dominant condition violated on ") + names[c] +
                                      " channel; stego singular vectors may drift from the cover's under perturbation");
        }
        const Vector perturbed = cov.sigma + alpha * tex.sigma;
        bands.cd[c] = cov.u * perturbed.asDiagonal() * cov.v.transpose();
        key.channels[c] = ChannelKey{cov.sigma, tex.u, tex.v};
    }
    result.stego = idwt2(bands);
    result.psnr_db = psnr(cover, result.stego);
    return result;
}

/// Recover the texture hidden by `embed`. `key.mode` selects the rebuild path.
inline Matrix extract(const FloatImage& stego, const StegoKey& key) {
    key.validate();
    if (stego.height() != 2 * key.side || stego.width() != 2 * key.side) {
        throw Error(Errc::shape, "stego dimensions do not match key side " + std::to_string(key.side));
    }
    const SubbandSet bands = dwt2(stego, key.family);
    ChannelPlaneSet planes;
    planes.side = key.side;
    planes.pad_count = key.pad_count;
    planes.original_rows = key.original_rows();
    for (std::size_t c = 0; c < kChannels; ++c) {
        const ChannelKey& ck = key.channels[c];
        const SvdTriple ext = svd(bands.cd[c]);
        const Vector recovered = ((ext.sigma - ck.cover_sigma) / key.alpha).cwiseMax(0.0);
        if (key.mode == ExtractionMode::key_based) {
            planes.planes[c] = ck.texture_u * recovered.asDiagonal() * ck.texture_v.transpose();
        } else {
            planes.planes[c] = ext.u * recovered.asDiagonal() * ext.v.transpose();
        }
    }
    return unpack_texture(planes);
}

}  // namespace texstego

#endif  // TEXSTEGO_STEGO_HPP
