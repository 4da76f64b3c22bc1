#ifndef TEXSTEGO_SVD_HPP
#define TEXSTEGO_SVD_HPP

#include <cmath>

#include <Eigen/SVD>

#include "image.hpp"

namespace texstego {

/// m = U * diag(sigma) * V^T with sigma non-increasing and non-negative.
struct SvdTriple {
    Matrix u;
    Vector sigma;
    Matrix v;

    Matrix reconstruct() const {
        const auto k = sigma.size();
        return u.leftCols(k) * sigma.asDiagonal() * v.leftCols(k).transpose();
    }
};

enum class SvdExtent { full, thin };

namespace detail {

/// Index of the largest-magnitude entry; ties resolve to the first index.
inline Eigen::Index argmax_abs(const Eigen::Ref<const Vector>& col) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        const double mag = std::abs(col(i));
        if (mag > best_mag) {
            best_mag = mag;
            best = i;
        }
    }
    return best;
}

inline void fix_column_sign(Matrix& m, Eigen::Index j) {
    if (m(argmax_abs(m.col(j)), j) < 0.0) {
        m.col(j) *= -1.0;
    }
}

}  // namespace detail

/**
 * Singular value decomposition with a deterministic sign convention: the
 * largest-magnitude entry of each paired column of U is positive and the
 * matching column of V is flipped with it. Unpaired columns (the null-space
 * completion of a full decomposition) are normalised the same way on their
 * own.
 */
inline SvdTriple svd(const Matrix& m, SvdExtent extent = SvdExtent::full) {
    if (m.size() == 0) {
        throw Error(Errc::shape, "svd of an empty matrix");
    }
    if (!m.allFinite()) {
        throw Error(Errc::numeric, "svd input contains non-finite entries");
    }
    const unsigned opts = extent == SvdExtent::full ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                                                    : (Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::BDCSVD<Matrix> dec(m, opts);
    if (dec.info() != Eigen::Success) {
        throw Error(Errc::numeric, "singular value decomposition failed");
    }
    SvdTriple out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
    const auto k = out.sigma.size();
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index idx = detail::argmax_abs(out.u.col(j));
        if (out.u(idx, j) < 0.0) {
            out.u.col(j) *= -1.0;
            out.v.col(j) *= -1.0;
        }
    }
    for (Eigen::Index j = k; j < out.u.cols(); ++j) {
        detail::fix_column_sign(out.u, j);
    }
    for (Eigen::Index j = k; j < out.v.cols(); ++j) {
        detail::fix_column_sign(out.v, j);
    }
    return out;
}

/// Largest |Q^T Q - I| entry.
inline double orthogonality_defect(const Matrix& q) {
    const Matrix gram = q.transpose() * q;
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace texstego

#endif  // TEXSTEGO_SVD_HPP
