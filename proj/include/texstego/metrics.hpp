#ifndef TEXSTEGO_METRICS_HPP
#define TEXSTEGO_METRICS_HPP

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "image.hpp"

namespace texstego {

/// psnr_db is +infinity exactly when mse == 0.
struct QualityReport {
    double mse = 0.0;
    double psnr_db = std::numeric_limits<double>::infinity();
    double peak = 255.0;

    bool lossless() const { return std::isinf(psnr_db); }

    /// Infinite PSNR serialises as the string "inf".
    nlohmann::json to_json() const {
        nlohmann::json j;
        j["mse"] = mse;
        if (lossless()) {
            j["psnr_db"] = "inf";
        } else {
            j["psnr_db"] = psnr_db;
        }
        j["peak"] = peak;
        return j;
    }
};

/// Mean squared difference over all H*W*3 samples jointly.
inline double mse(const FloatImage& a, const FloatImage& b) {
    if (!a.same_shape(b)) {
        throw Error(Errc::shape, "mse: image dimensions differ");
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < kChannels; ++c) {
        sum += (a.channel(c) - b.channel(c)).squaredNorm();
    }
    const auto count = static_cast<double>(a.height() * a.width()) * kChannels;
    return sum / count;
}

inline QualityReport quality(const FloatImage& a, const FloatImage& b) {
    if (a.peak() != b.peak()) {
        throw Error(Errc::shape, "psnr: declared peak values differ");
    }
    QualityReport r;
    r.peak = a.peak();
    r.mse = mse(a, b);
    r.psnr_db = r.mse == 0.0 ? std::numeric_limits<double>::infinity()
                             : -10.0 * std::log10(r.mse / (r.peak * r.peak));
    return r;
}

inline double psnr(const FloatImage& a, const FloatImage& b) { return quality(a, b).psnr_db; }

}  // namespace texstego

#endif  // TEXSTEGO_METRICS_HPP
