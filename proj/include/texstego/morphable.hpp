#ifndef TEXSTEGO_MORPHABLE_HPP
#define TEXSTEGO_MORPHABLE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/QR>

#include "svd.hpp"

namespace texstego {

// ---------------------------------------------------------------------------
// Sample statistics over N x 3 shape or texture matrices
// ---------------------------------------------------------------------------

namespace detail {

inline void require_uniform(std::span<const Matrix> samples, const char* what) {
    if (samples.empty()) {
        throw Error(Errc::shape, std::string(what) + ": no samples");
    }
    const auto rows = samples.front().rows();
    const auto cols = samples.front().cols();
    if (rows < 1 || cols < 1) {
        throw Error(Errc::shape, std::string(what) + ": empty sample");
    }
    for (const auto& s : samples) {
        if (s.rows() != rows || s.cols() != cols) {
            throw Error(Errc::shape, std::string(what) + ": samples have differing dimensions");
        }
    }
}

}  // namespace detail

inline Matrix compute_mean(std::span<const Matrix> samples) {
    detail::require_uniform(samples, "compute_mean");
    Matrix sum = Matrix::Zero(samples.front().rows(), samples.front().cols());
    for (const auto& s : samples) {
        sum += s;
    }
    return sum / static_cast<double>(samples.size());
}

/// Sum of weights[i] * samples[i]. Weights are not normalised.
inline Matrix linear_combine(std::span<const Matrix> samples, std::span<const double> weights) {
    detail::require_uniform(samples, "linear_combine");
    if (samples.size() != weights.size()) {
        throw Error(Errc::shape, "linear_combine: " + std::to_string(samples.size()) + " samples but " +
                                     std::to_string(weights.size()) + " weights");
    }
    Matrix out = Matrix::Zero(samples.front().rows(), samples.front().cols());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out += weights[i] * samples[i];
    }
    return out;
}

inline Matrix combine_average(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(Errc::shape, "combine_average: dimension mismatch");
    }
    return 0.5 * a + 0.5 * b;
}

// ---------------------------------------------------------------------------
// Flattened-vector basis: mean face plus principal components
// ---------------------------------------------------------------------------

/**
 * Principal components of a set of N x 3 samples, each flattened
 * column-major into a 3N vector (all x, then all y, then all z).
 *
 * Components are stored back in N x 3 form. `singular_values` holds every
 * singular value of the centred data matrix, including those below the
 * numerical-rank cutoff; `components` holds only the retained ones.
 */
struct BasisModel {
    Matrix mean;
    std::vector<Matrix> components;
    Vector singular_values;
    std::int64_t sample_count = 0;

    /// Eigenvalues of the sample covariance C = A A^T / m.
    Vector eigenvalues() const {
        return singular_values.array().square() / static_cast<double>(sample_count);
    }
};

inline constexpr double kRankCutoff = 1e-12;

inline BasisModel build_basis(std::span<const Matrix> samples) {
    if (samples.size() < 2) {
        throw Error(Errc::shape, "build_basis: need at least 2 samples");
    }
    BasisModel model;
    model.mean = compute_mean(samples);
    model.sample_count = static_cast<std::int64_t>(samples.size());
    const auto rows = model.mean.rows();
    const auto cols = model.mean.cols();
    const Eigen::Index dim = rows * cols;

    Matrix centred(dim, static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Matrix diff = samples[i] - model.mean;
        centred.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(diff.data(), dim);
    }
    const SvdTriple dec = svd(centred, SvdExtent::thin);
    model.singular_values = dec.sigma;
    const double lead = dec.sigma.size() ? dec.sigma(0) : 0.0;
    for (Eigen::Index k = 0; k < dec.sigma.size(); ++k) {
        if (!(lead > 0.0) || dec.sigma(k) <= kRankCutoff * lead) {
            break;
        }
        model.components.emplace_back(Eigen::Map<const Matrix>(dec.u.col(k).data(), rows, cols));
    }
    return model;
}

/// mean + sum_i coefficients[i] * components[i].
inline Matrix synthesize(const BasisModel& model, std::span<const double> coefficients) {
    if (coefficients.size() > model.components.size()) {
        throw Error(Errc::shape, "synthesize: " + std::to_string(coefficients.size()) +
                                     " coefficients for " + std::to_string(model.components.size()) +
                                     " components");
    }
    Matrix out = model.mean;
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        out += coefficients[i] * model.components[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-matrix PCA over the three columns
// ---------------------------------------------------------------------------

/// data ~= score * coeff^T + mean (mean replicated over rows).
struct PcaModel {
    Eigen::RowVectorXd mean;
    Matrix coeff;  ///< loadings, one column per component, decreasing variance
    Matrix score;

    Matrix reconstruct() const {
        return (score * coeff.transpose()).rowwise() + mean;
    }
};

enum class MissingPolicy { none, als };

struct PcaOptions {
    MissingPolicy missing = MissingPolicy::none;
    /// Rank of the low-rank model that imputes missing entries; 0 = all columns.
    Eigen::Index components = 0;
    double tolerance = 1e-8;
    std::size_t max_iterations = 500;
};

namespace detail {

inline PcaModel pca_complete(const Matrix& data) {
    PcaModel model;
    model.mean = data.colwise().mean();
    const Matrix centred = data.rowwise() - model.mean;
    const SvdTriple dec = svd(centred, SvdExtent::thin);
    model.coeff = dec.v;
    model.score = dec.u * dec.sigma.asDiagonal();
    // Signs are fixed on the loadings, not the scores: the largest-magnitude
    // entry of each coeff column is positive. Faces that share colour or
    // coordinate axes then get matching signs, which reexpress relies on.
    for (Eigen::Index j = 0; j < model.coeff.cols(); ++j) {
        if (model.coeff(texstego::detail::argmax_abs(model.coeff.col(j)), j) < 0.0) {
            model.coeff.col(j) *= -1.0;
            model.score.col(j) *= -1.0;
        }
    }
    return model;
}

}  // namespace detail

/**
 * PCA of an N x p matrix (p = 3 for shapes and textures).
 *
 * With MissingPolicy::als, non-finite entries are treated as missing and
 * imputed by alternating two least-squares steps: loadings and mean from the
 * SVD of the completed matrix, then per-row scores fitted to the observed
 * entries only, which refill the missing ones. Iteration stops when the
 * fit changes by less than `tolerance` (relative Frobenius) or the iteration
 * budget runs out. The returned model is the full PCA of the converged filled matrix, so it
 * reproduces every observed entry.
 */
inline PcaModel pca_fit(const Matrix& data, const PcaOptions& options = {}) {
    const auto n = data.rows();
    const auto p = data.cols();
    if (p < 1 || n < 3 || n < p) {
        throw Error(Errc::shape, "pca_fit: need at least max(3, columns) rows, got " + std::to_string(n));
    }
    if (options.missing == MissingPolicy::none) {
        if (!data.allFinite()) {
            throw Error(Errc::numeric, "pca_fit: data contains non-finite entries");
        }
        return detail::pca_complete(data);
    }

    const Eigen::Index rank = options.components == 0 ? p : options.components;
    if (rank < 1 || rank > p) {
        throw Error(Errc::parameter, "pca_fit: component count out of range");
    }
    const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> missing = !data.array().isFinite();
    Matrix filled = data;
    for (Eigen::Index j = 0; j < p; ++j) {
        double sum = 0.0;
        Eigen::Index count = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!missing(i, j)) {
                sum += data(i, j);
                ++count;
            }
        }
        if (count == 0) {
            throw Error(Errc::numeric, "pca_fit: column " + std::to_string(j) + " has no observed entries");
        }
        const double col_mean = sum / static_cast<double>(count);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (missing(i, j)) {
                filled(i, j) = col_mean;
            }
        }
    }
    if (!missing.any()) {
        return detail::pca_complete(filled);
    }

    // Rows with gaps, and the observed/missing column indices of each.
    struct Gappy {
        Eigen::Index row;
        std::vector<Eigen::Index> seen;
        std::vector<Eigen::Index> unseen;
    };
    std::vector<Gappy> gappy;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!missing.row(i).any()) {
            continue;
        }
        Gappy g{i, {}, {}};
        for (Eigen::Index j = 0; j < p; ++j) {
            (missing(i, j) ? g.unseen : g.seen).push_back(j);
        }
        gappy.push_back(std::move(g));
    }

    Matrix previous;
    double change = std::numeric_limits<double>::infinity();
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        // Loadings and mean from the current completed matrix.
        const Eigen::RowVectorXd mu = filled.colwise().mean();
        const SvdTriple dec = svd(filled.rowwise() - mu, SvdExtent::thin);
        const Matrix loadings = dec.v.leftCols(rank);
        Matrix fit = (dec.u.leftCols(rank) * dec.sigma.head(rank).asDiagonal() * loadings.transpose()).rowwise() + mu;

        // Scores of each gappy row from its observed entries alone
        // (minimum-norm when the row underdetermines them), then refill.
        for (const Gappy& g : gappy) {
            const auto k = static_cast<Eigen::Index>(g.seen.size());
            Matrix a(k, rank);
            Vector b(k);
            for (Eigen::Index t = 0; t < k; ++t) {
                const Eigen::Index j = g.seen[static_cast<std::size_t>(t)];
                a.row(t) = loadings.row(j);
                b(t) = data(g.row, j) - mu(j);
            }
            const Vector z = k == 0 ? Vector::Zero(rank) : Vector(a.completeOrthogonalDecomposition().solve(b));
            fit.row(g.row) = (loadings * z).transpose() + mu;
            for (const Eigen::Index j : g.unseen) {
                filled(g.row, j) = fit(g.row, j);
            }
        }

        if (previous.size() != 0) {
            const double scale = std::max(fit.norm(), std::numeric_limits<double>::min());
            change = (fit - previous).norm() / scale;
        }
        if (change < options.tolerance) {
            return detail::pca_complete(filled);
        }
        previous = std::move(fit);
    }
    throw ConvergenceError(options.max_iterations, change);
}

/// Scores of `source` expressed in the basis and mean of `target`.
inline Matrix reexpress(const PcaModel& source, const PcaModel& target) {
    if (source.score.cols() != target.coeff.cols() || target.coeff.rows() != target.mean.size() ||
        source.score.rows() != target.score.rows()) {
        throw Error(Errc::shape, "reexpress: models have incompatible dimensions");
    }
    return (source.score * target.coeff.transpose()).rowwise() + target.mean;
}

// ---------------------------------------------------------------------------
// Synthetic faces
// ---------------------------------------------------------------------------

struct FaceSample {
    Matrix shape;
    Matrix texture;
};

struct SynthOptions {
    int rank = 3;                   ///< number of latent modes per family
    double shape_noise = 1e-3;      ///< half-width of uniform per-entry noise
    double texture_noise = 0.25;
};

/**
 * Deterministic stand-in for a registered face database: every sample is a
 * shared mean plus `rank` random modes with random weights plus small
 * uniform noise. Shapes are in millimetre-like units around the origin.
 *
 * Textures are built like skin albedo: per-vertex coordinates along a
 * luminance axis (the skin tint), a weaker redness axis and a faint residual
 * axis, added to a base skin colour. The channels are therefore strongly
 * correlated and every face shares the same well-separated colour axes, as
 * real face scans do. Values stay inside [0, 255] without clipping.
 */
inline std::vector<FaceSample> synth_dataset(std::uint64_t seed, std::int64_t n_vertices,
                                             std::int64_t n_samples, const SynthOptions& opt = {}) {
    if (n_vertices < 3 || n_samples < 2 || opt.rank < 1) {
        throw Error(Errc::parameter, "synth_dataset: need n_vertices >= 3, n_samples >= 2");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto random_matrix = [&](double lo, double hi) {
        Matrix m(n_vertices, 3);
        for (Eigen::Index j = 0; j < 3; ++j) {
            for (Eigen::Index i = 0; i < n_vertices; ++i) {
                m(i, j) = lo + (hi - lo) * 0.5 * (unit(rng) + 1.0);
            }
        }
        return m;
    };

    // Rows are colour axes in RGB, already scaled: luminance, redness, residual.
    Matrix colour_axes(3, 3);
    colour_axes << 55.0, 44.0, 35.75,
                   8.4, -7.0, -4.2,
                   1.0, 2.5, -4.0;
    const Eigen::RowVector3d base_colour(190.0, 145.0, 120.0);
    // Colour coordinates: 0.6 for the shared mean, 0.4 split across modes,
    // so |coordinate| <= 1 and each channel stays within base +- sum|axis|.
    constexpr double mean_share = 0.6;
    constexpr double mode_share = 0.4;

    const Matrix shape_mean = random_matrix(-100.0, 100.0);
    const Matrix texture_mean = (mean_share * random_matrix(-1.0, 1.0) * colour_axes).rowwise() + base_colour;
    std::vector<Matrix> shape_modes;
    std::vector<Matrix> texture_modes;
    for (int k = 0; k < opt.rank; ++k) {
        shape_modes.push_back(random_matrix(-1.0, 1.0));
        texture_modes.push_back(random_matrix(-1.0, 1.0) * colour_axes);
    }
    const double texture_weight = mode_share / opt.rank;
    const double shape_weight = 15.0 / opt.rank;

    std::vector<FaceSample> out;
    out.reserve(static_cast<std::size_t>(n_samples));
    for (std::int64_t s = 0; s < n_samples; ++s) {
        FaceSample face{shape_mean, texture_mean};
        for (int k = 0; k < opt.rank; ++k) {
            face.shape += shape_weight * unit(rng) * shape_modes[static_cast<std::size_t>(k)];
            face.texture += texture_weight * unit(rng) * texture_modes[static_cast<std::size_t>(k)];
        }
        face.shape += opt.shape_noise * random_matrix(-1.0, 1.0);
        face.texture += opt.texture_noise * random_matrix(-1.0, 1.0);
        out.push_back(std::move(face));
    }
    return out;
}

}  // namespace texstego

#endif  // TEXSTEGO_MORPHABLE_HPP
