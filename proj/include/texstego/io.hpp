#ifndef TEXSTEGO_IO_HPP
#define TEXSTEGO_IO_HPP

// Binary containers. All integers are unsigned 64-bit little-endian, all
// reals IEEE-754 float64 little-endian, matrices row-major.
//
//   TXM1  magic, rows, cols, rows*cols values
//   STG1  magic, height, width, channels (= 3), peak, H*W*3 values in
//         (row, column, channel) order
//   KEY1  magic, alpha, side, pad count, peak, then per channel (r, g, b):
//         cover singular values as (length, values), texture U and V as
//         (rows, cols, values); then one byte extraction mode (0 literal,
//         1 key-based) and one byte wavelet family (0 Haar)
//   PCA1  magic, u64 model kind (0 PCA, 1 basis), u64 block count, then that
//         many complete TXM1 records

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "image.hpp"
#include "morphable.hpp"
#include "stego.hpp"

namespace texstego::io {

using Bytes = std::vector<unsigned char>;

class Writer {
public:
    void magic(std::string_view tag) { buf_.insert(buf_.end(), tag.begin(), tag.end()); }

    void u8(std::uint8_t v) { buf_.push_back(v); }

    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            buf_.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
        }
    }

    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void matrix(const Matrix& m) {
        u64(static_cast<std::uint64_t>(m.rows()));
        u64(static_cast<std::uint64_t>(m.cols()));
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                f64(m(r, c));
            }
        }
    }

    void vector(const Vector& v) {
        u64(static_cast<std::uint64_t>(v.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            f64(v(i));
        }
    }

    const Bytes& bytes() const { return buf_; }

private:
    Bytes buf_;
};

class Reader {
public:
    explicit Reader(const Bytes& buf) : buf_(buf) {}

    void expect_magic(std::string_view tag) {
        need(tag.size());
        if (std::memcmp(buf_.data() + pos_, tag.data(), tag.size()) != 0) {
            throw Error(Errc::bad_magic, "expected magic tag " + std::string(tag));
        }
        pos_ += tag.size();
    }

    std::uint8_t u8() {
        need(1);
        return buf_[pos_++];
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(buf_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
        }
        pos_ += 8;
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    /// Reads a dimension pair and verifies the payload is present.
    std::pair<Eigen::Index, Eigen::Index> dims() {
        const auto rows = u64();
        const auto cols = u64();
        if (rows == 0 || cols == 0) {
            throw Error(Errc::dimension, "matrix dimensions must be >= 1, got " +
                                             std::to_string(rows) + "x" + std::to_string(cols));
        }
        constexpr std::uint64_t limit = std::uint64_t{1} << 40;
        if (rows > limit / cols) {
            throw Error(Errc::dimension, "matrix dimensions implausibly large");
        }
        need(rows * cols * 8);
        return {static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
    }

    Matrix matrix() {
        const auto [rows, cols] = dims();
        Matrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                m(r, c) = f64();
            }
        }
        return m;
    }

    Vector vector() {
        const auto n = u64();
        if (n > (std::uint64_t{1} << 40)) {
            throw Error(Errc::dimension, "vector length implausibly large");
        }
        need(n * 8);
        Vector v(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            v(i) = f64();
        }
        return v;
    }

    bool at_end() const { return pos_ == buf_.size(); }

    void expect_end() const {
        if (!at_end()) {
            throw Error(Errc::dimension, "trailing bytes after payload");
        }
    }

private:
    void need(std::uint64_t n) const {
        if (n > buf_.size() - pos_) {
            throw Error(Errc::truncated, "file truncated: need " + std::to_string(n) + " more bytes");
        }
    }

    const Bytes& buf_;
    std::size_t pos_ = 0;
};

inline void write_file(const std::filesystem::path& path, const Bytes& bytes) {
    if (path.empty()) {
        throw Error(Errc::io, "empty output path");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::io, "cannot open for writing: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(Errc::io, "write failed: " + path.string());
    }
}

inline Bytes read_file(const std::filesystem::path& path) {
    if (path.empty()) {
        throw Error(Errc::io, "empty input path");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::io, "cannot open for reading: " + path.string());
    }
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Wraps parse errors with the file path.
template <typename Fn>
auto parse_file(const std::filesystem::path& path, Fn&& parse) {
    const Bytes bytes = read_file(path);
    try {
        Reader r(bytes);
        return parse(r);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

// --- matrices ---------------------------------------------------------------

inline constexpr std::string_view kMatrixMagic = "TXM1";

inline void write_matrix_record(Writer& w, const Matrix& m) {
    w.magic(kMatrixMagic);
    w.matrix(m);
}

inline Matrix read_matrix_record(Reader& r) {
    r.expect_magic(kMatrixMagic);
    return r.matrix();
}

inline void save_matrix(const Matrix& m, const std::filesystem::path& path) {
    if (m.size() == 0) {
        throw Error(Errc::dimension, "refusing to save an empty matrix");
    }
    Writer w;
    write_matrix_record(w, m);
    write_file(path, w.bytes());
}

inline Matrix load_matrix(const std::filesystem::path& path) {
    return parse_file(path, [](Reader& r) {
        Matrix m = read_matrix_record(r);
        r.expect_end();
        return m;
    });
}

// --- stego container ---------------------------------------------------------

inline constexpr std::string_view kStegoMagic = "STG1";

inline Bytes encode_stego(const FloatImage& img) {
    if (img.empty()) {
        throw Error(Errc::dimension, "refusing to save an empty image");
    }
    Writer w;
    w.magic(kStegoMagic);
    w.u64(static_cast<std::uint64_t>(img.height()));
    w.u64(static_cast<std::uint64_t>(img.width()));
    w.u64(kChannels);
    w.f64(img.peak());
    for (Eigen::Index r = 0; r < img.height(); ++r) {
        for (Eigen::Index c = 0; c < img.width(); ++c) {
            for (std::size_t ch = 0; ch < kChannels; ++ch) {
                w.f64(img.at(r, c, ch));
            }
        }
    }
    return w.bytes();
}

inline FloatImage decode_stego(Reader& r) {
    r.expect_magic(kStegoMagic);
    const auto h = r.u64();
    const auto w = r.u64();
    const auto ch = r.u64();
    if (h == 0 || w == 0) {
        throw Error(Errc::dimension, "stego image has zero dimension");
    }
    if (ch != kChannels) {
        throw Error(Errc::dimension, "stego image must have 3 channels, got " + std::to_string(ch));
    }
    const double peak = r.f64();
    FloatImage img(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(w), peak);
    for (Eigen::Index row = 0; row < img.height(); ++row) {
        for (Eigen::Index col = 0; col < img.width(); ++col) {
            for (std::size_t c = 0; c < kChannels; ++c) {
                img.at(row, col, c) = r.f64();
            }
        }
    }
    r.expect_end();
    return img;
}

inline void save_stego(const FloatImage& img, const std::filesystem::path& path) {
    write_file(path, encode_stego(img));
}

inline FloatImage load_stego(const std::filesystem::path& path) {
    return parse_file(path, [](Reader& r) { return decode_stego(r); });
}

// --- key ---------------------------------------------------------------------

inline constexpr std::string_view kKeyMagic = "KEY1";

inline Bytes encode_key(const StegoKey& key) {
    Writer w;
    w.magic(kKeyMagic);
    w.f64(key.alpha);
    w.u64(static_cast<std::uint64_t>(key.side));
    w.u64(static_cast<std::uint64_t>(key.pad_count));
    w.f64(key.peak);
    for (const auto& ch : key.channels) {
        w.vector(ch.cover_sigma);
        w.matrix(ch.texture_u);
        w.matrix(ch.texture_v);
    }
    w.u8(static_cast<std::uint8_t>(key.mode));
    w.u8(static_cast<std::uint8_t>(key.family));
    return w.bytes();
}

inline StegoKey decode_key(Reader& r) {
    r.expect_magic(kKeyMagic);
    StegoKey key;
    key.alpha = r.f64();
    key.side = static_cast<std::int64_t>(r.u64());
    key.pad_count = static_cast<std::int64_t>(r.u64());
    key.peak = r.f64();
    for (auto& ch : key.channels) {
        ch.cover_sigma = r.vector();
        ch.texture_u = r.matrix();
        ch.texture_v = r.matrix();
    }
    const auto mode = r.u8();
    if (mode > 1) {
        throw Error(Errc::key, "unknown extraction mode flag " + std::to_string(mode));
    }
    key.mode = static_cast<ExtractionMode>(mode);
    const auto family = r.u8();
    if (family != 0) {
        throw Error(Errc::key, "unknown wavelet family " + std::to_string(family));
    }
    key.family = WaveletFamily::haar;
    r.expect_end();
    key.validate();
    return key;
}

inline void save_key(const StegoKey& key, const std::filesystem::path& path) {
    write_file(path, encode_key(key));
}

inline StegoKey load_key(const std::filesystem::path& path) {
    return parse_file(path, [](Reader& r) { return decode_key(r); });
}

// --- model bundles -------------------------------------------------------------

inline constexpr std::string_view kModelMagic = "PCA1";

enum class ModelKind : std::uint64_t { pca = 0, basis = 1 };

inline void save_blocks(ModelKind kind, const std::vector<Matrix>& blocks,
                        const std::filesystem::path& path) {
    Writer w;
    w.magic(kModelMagic);
    w.u64(static_cast<std::uint64_t>(kind));
    w.u64(blocks.size());
    for (const auto& b : blocks) {
        write_matrix_record(w, b);
    }
    write_file(path, w.bytes());
}

inline std::vector<Matrix> load_blocks(ModelKind kind, const std::filesystem::path& path) {
    return parse_file(path, [kind](Reader& r) {
        r.expect_magic(kModelMagic);
        if (r.u64() != static_cast<std::uint64_t>(kind)) {
            throw Error(Errc::bad_magic, "model bundle holds a different model kind");
        }
        const auto n = r.u64();
        if (n > 1024) {
            throw Error(Errc::dimension, "implausible block count");
        }
        std::vector<Matrix> blocks;
        for (std::uint64_t i = 0; i < n; ++i) {
            blocks.push_back(read_matrix_record(r));
        }
        r.expect_end();
        return blocks;
    });
}

inline void save_pca_model(const PcaModel& m, const std::filesystem::path& path) {
    save_blocks(ModelKind::pca, {Matrix(m.mean), m.coeff, m.score}, path);
}

inline PcaModel load_pca_model(const std::filesystem::path& path) {
    auto blocks = load_blocks(ModelKind::pca, path);
    if (blocks.size() != 3 || blocks[0].rows() != 1 || blocks[1].rows() != blocks[0].cols() ||
        blocks[2].cols() != blocks[1].cols()) {
        throw Error(Errc::dimension, path.string() + ": malformed PCA model");
    }
    return PcaModel{blocks[0].row(0), std::move(blocks[1]), std::move(blocks[2])};
}

/// Blocks: mean, singular values (as a column), sample count (1x1), then one per component.
inline void save_basis(const BasisModel& m, const std::filesystem::path& path) {
    std::vector<Matrix> blocks{m.mean, Matrix(m.singular_values),
                               Matrix::Constant(1, 1, static_cast<double>(m.sample_count))};
    blocks.insert(blocks.end(), m.components.begin(), m.components.end());
    save_blocks(ModelKind::basis, blocks, path);
}

inline BasisModel load_basis(const std::filesystem::path& path) {
    auto blocks = load_blocks(ModelKind::basis, path);
    if (blocks.size() < 3 || blocks[1].cols() != 1 || blocks[2].size() != 1) {
        throw Error(Errc::dimension, path.string() + ": malformed basis model");
    }
    BasisModel m;
    m.mean = std::move(blocks[0]);
    m.singular_values = blocks[1].col(0);
    m.sample_count = static_cast<std::int64_t>(blocks[2](0, 0));
    for (std::size_t i = 3; i < blocks.size(); ++i) {
        if (blocks[i].rows() != m.mean.rows() || blocks[i].cols() != m.mean.cols()) {
            throw Error(Errc::dimension, path.string() + ": component shape differs from mean");
        }
        m.components.push_back(std::move(blocks[i]));
    }
    return m;
}

/// Up to the first eight bytes of a file; enough to tell PNG from our containers.
inline std::string sniff_magic(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::io, "cannot open for reading: " + path.string());
    }
    std::array<char, 8> head{};
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    return std::string(head.data(), static_cast<std::size_t>(in.gcount()));
}

}  // namespace texstego::io

#endif  // TEXSTEGO_IO_HPP
