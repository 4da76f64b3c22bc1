#ifndef TEXSTEGO_WAVELET_HPP
#define TEXSTEGO_WAVELET_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "image.hpp"

namespace texstego {

enum class WaveletFamily : std::uint8_t { haar = 0 };

inline std::string_view to_string(WaveletFamily f) {
    switch (f) {
        case WaveletFamily::haar: return "haar";
    }
    return "unknown";
}

inline std::optional<WaveletFamily> parse_wavelet_family(std::string_view name) {
    if (name == "haar" || name == "db1") {
        return WaveletFamily::haar;
    }
    return std::nullopt;
}

using ChannelStack = std::array<Matrix, kChannels>;

/// One level of 2-D decomposition for all three channels.
struct SubbandSet {
    ChannelStack ca;  ///< approximation
    ChannelStack ch;  ///< horizontal detail
    ChannelStack cv;  ///< vertical detail
    ChannelStack cd;  ///< diagonal detail
    WaveletFamily family = WaveletFamily::haar;
    double peak = 255.0;  ///< peak of the analysed image, restored on synthesis
};

/// Subbands of a single plane, in (CA, CH, CV, CD) order.
struct PlaneSubbands {
    Matrix ca, ch, cv, cd;
};

/**
 * Orthonormal Haar analysis of one plane. For each 2x2 block
 *
 *     a b
 *     c d
 *
 * CA = (a+b+c+d)/2, CH = (a-b+c-d)/2, CV = (a+b-c-d)/2, CD = (a-b-c+d)/2.
 * CH differences neighbouring columns, CV neighbouring rows.
 */
inline PlaneSubbands haar_analyze(const Matrix& x) {
    const auto rows = x.rows();
    const auto cols = x.cols();
    if (rows < 2 || cols < 2 || rows % 2 != 0 || cols % 2 != 0) {
        throw Error(Errc::dimension, "wavelet analysis needs even dimensions >= 2, got " +
                                         std::to_string(rows) + "x" + std::to_string(cols));
    }
    const auto h = rows / 2;
    const auto w = cols / 2;
    PlaneSubbands s{Matrix(h, w), Matrix(h, w), Matrix(h, w), Matrix(h, w)};
    for (Eigen::Index j = 0; j < w; ++j) {
        for (Eigen::Index i = 0; i < h; ++i) {
            const double a = x(2 * i, 2 * j);
            const double b = x(2 * i, 2 * j + 1);
            const double c = x(2 * i + 1, 2 * j);
            const double d = x(2 * i + 1, 2 * j + 1);
            s.ca(i, j) = 0.5 * ((a + b) + (c + d));
            s.ch(i, j) = 0.5 * ((a - b) + (c - d));
            s.cv(i, j) = 0.5 * ((a + b) - (c + d));
            s.cd(i, j) = 0.5 * ((a - b) - (c - d));
        }
    }
    return s;
}

inline Matrix haar_synthesize(const Matrix& ca, const Matrix& ch, const Matrix& cv,
                              const Matrix& cd) {
    const auto h = ca.rows();
    const auto w = ca.cols();
    for (const Matrix* m : {&ch, &cv, &cd}) {
        if (m->rows() != h || m->cols() != w) {
            throw Error(Errc::shape, "subbands must share identical dimensions");
        }
    }
    if (h < 1 || w < 1) {
        throw Error(Errc::dimension, "empty subbands");
    }
    Matrix x(2 * h, 2 * w);
    for (Eigen::Index j = 0; j < w; ++j) {
        for (Eigen::Index i = 0; i < h; ++i) {
            const double A = ca(i, j);
            const double H = ch(i, j);
            const double V = cv(i, j);
            const double D = cd(i, j);
            x(2 * i, 2 * j) = 0.5 * ((A + H) + (V + D));
            x(2 * i, 2 * j + 1) = 0.5 * ((A - H) + (V - D));
            x(2 * i + 1, 2 * j) = 0.5 * ((A + H) - (V + D));
            x(2 * i + 1, 2 * j + 1) = 0.5 * ((A - H) - (V - D));
        }
    }
    return x;
}

inline SubbandSet dwt2(const FloatImage& img, WaveletFamily family = WaveletFamily::haar) {
    if (img.empty()) {
        throw Error(Errc::dimension, "cannot transform an empty image");
    }
    SubbandSet out;
    out.family = family;
    out.peak = img.peak();
    for (std::size_t c = 0; c < kChannels; ++c) {
        auto s = haar_analyze(img.channel(c));
        out.ca[c] = std::move(s.ca);
        out.ch[c] = std::move(s.ch);
        out.cv[c] = std::move(s.cv);
        out.cd[c] = std::move(s.cd);
    }
    return out;
}

inline FloatImage idwt2(const SubbandSet& s) {
    ChannelStack planes;
    for (std::size_t c = 0; c < kChannels; ++c) {
        if (s.ca[c].rows() != s.ca[0].rows() || s.ca[c].cols() != s.ca[0].cols()) {
            throw Error(Errc::shape, "subband channels differ in size");
        }
        planes[c] = haar_synthesize(s.ca[c], s.ch[c], s.cv[c], s.cd[c]);
    }
    return FloatImage(std::move(planes), s.peak);
}

}  // namespace texstego

#endif  // TEXSTEGO_WAVELET_HPP
