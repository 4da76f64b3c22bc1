#ifndef TEXSTEGO_IMAGE_HPP
#define TEXSTEGO_IMAGE_HPP

#include <array>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "error.hpp"

namespace texstego {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t kChannels = 3;

/**
 * Three-channel float64 image stored as one plane per channel.
 *
 * Samples nominally live in [0, peak]; the peak travels with the image so
 * that quality metrics never have to guess the dynamic range. Nothing
 * enforces the range on the samples themselves: stego images routinely
 * carry sub-quantum excursions outside it.
 */
class FloatImage {
public:
    FloatImage() = default;

    FloatImage(Eigen::Index height, Eigen::Index width, double peak)
        : peak_(peak) {
        if (height < 1 || width < 1) {
            throw Error(Errc::dimension, "image dimensions must be positive");
        }
        check_peak(peak);
        for (auto& p : planes_) {
            p = Matrix::Zero(height, width);
        }
    }

    FloatImage(std::array<Matrix, kChannels> planes, double peak)
        : planes_(std::move(planes)), peak_(peak) {
        check_peak(peak);
        const auto h = planes_[0].rows();
        const auto w = planes_[0].cols();
        if (h < 1 || w < 1) {
            throw Error(Errc::dimension, "image dimensions must be positive");
        }
        for (const auto& p : planes_) {
            if (p.rows() != h || p.cols() != w) {
                throw Error(Errc::shape, "channel planes differ in size");
            }
        }
    }

    Eigen::Index height() const { return planes_[0].rows(); }
    Eigen::Index width() const { return planes_[0].cols(); }
    double peak() const { return peak_; }
    bool empty() const { return planes_[0].size() == 0; }

    Matrix& channel(std::size_t c) { return planes_.at(c); }
    const Matrix& channel(std::size_t c) const { return planes_.at(c); }

    const std::array<Matrix, kChannels>& planes() const { return planes_; }

    double& at(Eigen::Index r, Eigen::Index c, std::size_t ch) { return planes_[ch](r, c); }
    double at(Eigen::Index r, Eigen::Index c, std::size_t ch) const { return planes_[ch](r, c); }

    bool same_shape(const FloatImage& other) const {
        return height() == other.height() && width() == other.width();
    }

    friend bool operator==(const FloatImage& a, const FloatImage& b) {
        if (a.peak_ != b.peak_ || !a.same_shape(b)) {
            return false;
        }
        for (std::size_t c = 0; c < kChannels; ++c) {
            if (a.planes_[c] != b.planes_[c]) {
                return false;
            }
        }
        return true;
    }

private:
    static void check_peak(double peak) {
        if (!(peak > 0.0)) {
            throw Error(Errc::parameter, "image peak value must be positive");
        }
    }

    std::array<Matrix, kChannels> planes_;
    double peak_ = 255.0;
};

}  // namespace texstego

#endif  // TEXSTEGO_IMAGE_HPP
