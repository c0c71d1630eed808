/**
 * @file numerics.hpp
 * @brief Dense complex linear algebra kernels with a pinned tolerance policy.
 *
 * All rank decisions in the library go through rank_svd with a relative
 * threshold against the largest singular value, so that every caller applies
 * the same cutoff.  Kernels, orthogonal complements and polar data come from
 * SVD; spectral projectors for possibly non-normal operators come from a
 * reordered Schur form plus a Sylvester solve, never from diagonalization.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace qrep {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Numerical thresholds used throughout.  rank_rel_tol is relative to the
/// largest singular value of the matrix at hand; residual_tol bounds
/// acceptable defect norms of verified identities; eig_cluster_gap is the
/// minimum separation between selected and discarded eigenvalues when a
/// spectral projector is formed.
struct TolerancePolicy {
    double rank_rel_tol = 1e-10;
    double residual_tol = 1e-8;
    double eig_cluster_gap = 1e-6;
};

inline CMatrix cidentity(Eigen::Index n) { return CMatrix::Identity(n, n); }

namespace detail {

// Jacobi SVD is the most accurate backend but cubic with a large constant;
// the divide and conquer backend takes over for larger systems (the Hom
// solver produces kernels with hundreds to thousands of columns).
constexpr Eigen::Index kBigSvd = 64;

struct SvdData {
    Eigen::VectorXd sv;
    CMatrix u;  // empty unless full decomposition requested
    CMatrix v;
};

inline SvdData full_svd(const CMatrix& m) {
    SvdData out;
    if (std::min(m.rows(), m.cols()) > kBigSvd) {
        Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        out.sv = svd.singularValues();
        out.u = svd.matrixU();
        out.v = svd.matrixV();
    } else {
        Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        out.sv = svd.singularValues();
        out.u = svd.matrixU();
        out.v = svd.matrixV();
    }
    return out;
}

inline Eigen::VectorXd singular_values(const CMatrix& m) {
    if (std::min(m.rows(), m.cols()) > kBigSvd)
        return Eigen::BDCSVD<CMatrix>(m).singularValues();
    return Eigen::JacobiSVD<CMatrix>(m).singularValues();
}

inline int svd_rank(const SvdData& svd, const TolerancePolicy& tol) {
    const auto& sv = svd.sv;
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    const double cut = tol.rank_rel_tol * sv(0);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++r;
    return r;
}

} // namespace detail

/// Numerical rank: number of singular values exceeding rank_rel_tol times
/// the largest one.  Matrices with a zero dimension have rank 0.
inline int rank_svd(const CMatrix& m, const TolerancePolicy& tol = {}) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    const Eigen::VectorXd sv = detail::singular_values(m);
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    const double cut = tol.rank_rel_tol * sv(0);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++r;
    return r;
}

/// Orthonormal basis of Ker m as columns of a cols x k matrix.  A map out of
/// the zero space has an empty kernel basis; a matrix with zero rows is the
/// zero map, whose kernel is everything.
inline CMatrix kernel_onb(const CMatrix& m, const TolerancePolicy& tol = {}) {
    if (m.cols() == 0) return CMatrix(0, 0);
    if (m.rows() == 0) return cidentity(m.cols());
    auto svd = detail::full_svd(m);
    const int r = detail::svd_rank(svd, tol);
    return svd.v.rightCols(m.cols() - r);
}

/// Orthonormal basis of the orthogonal complement of the column span of m
/// inside the ambient space C^rows.
inline CMatrix orth_complement_onb(const CMatrix& m, const TolerancePolicy& tol = {}) {
    if (m.rows() == 0) return CMatrix(0, 0);
    if (m.cols() == 0) return cidentity(m.rows());
    auto svd = detail::full_svd(m);
    const int r = detail::svd_rank(svd, tol);
    return svd.u.rightCols(m.rows() - r);
}

/// Orthonormal basis of the column span of m.
inline CMatrix image_onb(const CMatrix& m, const TolerancePolicy& tol = {}) {
    if (m.rows() == 0 || m.cols() == 0) return CMatrix(m.rows(), 0);
    auto svd = detail::full_svd(m);
    const int r = detail::svd_rank(svd, tol);
    return svd.u.leftCols(r);
}

/// Polar data of t: a partial isometry u with initial space Im|t| and final
/// space Im t, and the positive factor |t| = sqrt(t* t), with t = u |t|.
/// polar_parts of a zero matrix is (0, 0).
struct PolarParts {
    CMatrix u;    // partial isometry, rows(t) x cols(t)
    CMatrix abs;  // |t|, cols(t) x cols(t), positive semidefinite
};

inline PolarParts polar_parts(const CMatrix& t, const TolerancePolicy& tol = {}) {
    PolarParts out;
    out.u = CMatrix::Zero(t.rows(), t.cols());
    out.abs = CMatrix::Zero(t.cols(), t.cols());
    if (t.rows() == 0 || t.cols() == 0) return out;
    auto svd = detail::full_svd(t);
    const int r = detail::svd_rank(svd, tol);
    const auto& sv = svd.sv;
    const CMatrix ur = svd.u.leftCols(r);
    const CMatrix vr = svd.v.leftCols(r);
    out.u = ur * vr.adjoint();
    out.abs = vr * sv.head(r).asDiagonal() * vr.adjoint();
    return out;
}

/// Left quasi-inverse of t: the unique b with b t = q, t b t = t, b t b = b
/// and b* b supported on Im t (the Moore-Penrose pseudoinverse), together
/// with the orthogonal projection q = b t onto Im t* = (Ker t)^perp.
struct LeftQuasiInverse {
    CMatrix b;  // cols(t) x rows(t)
    CMatrix q;  // cols(t) x cols(t), orthogonal projection
};

inline LeftQuasiInverse left_quasi_inverse(const CMatrix& t, const TolerancePolicy& tol = {}) {
    LeftQuasiInverse out;
    out.b = CMatrix::Zero(t.cols(), t.rows());
    out.q = CMatrix::Zero(t.cols(), t.cols());
    if (t.rows() == 0 || t.cols() == 0) return out;
    auto svd = detail::full_svd(t);
    const int r = detail::svd_rank(svd, tol);
    const auto& sv = svd.sv;
    const CMatrix ur = svd.u.leftCols(r);
    const CMatrix vr = svd.v.leftCols(r);
    Eigen::VectorXd inv(r);
    for (int i = 0; i < r; ++i) inv(i) = 1.0 / sv(i);
    out.b = vr * inv.asDiagonal() * ur.adjoint();
    out.q = vr * vr.adjoint();
    return out;
}

namespace detail {

/// Swap adjacent diagonal entries i, i+1 of the upper triangular factor u of
/// a complex Schur form, updating the unitary z accordingly.
inline void schur_swap(CMatrix& u, CMatrix& z, Eigen::Index i) {
    const Complex a = u(i, i);
    const Complex b = u(i, i + 1);
    const Complex c = u(i + 1, i + 1);
    // Eigenvector of [[a, b], [0, c]] for eigenvalue c is (b, c - a).
    Complex v0 = b, v1 = c - a;
    const double nrm = std::sqrt(std::norm(v0) + std::norm(v1));
    if (nrm == 0.0) return;  // equal eigenvalues, nothing to move
    v0 /= nrm;
    v1 /= nrm;
    CMatrix g(2, 2);
    g << v0, -std::conj(v1), v1, std::conj(v0);
    u.block(0, i, u.rows(), 2) = u.block(0, i, u.rows(), 2) * g;
    u.block(i, 0, 2, u.cols()) = g.adjoint() * u.block(i, 0, 2, u.cols());
    z.block(0, i, z.rows(), 2) = z.block(0, i, z.rows(), 2) * g;
    u(i + 1, i) = Complex(0, 0);
}

/// Solve the Sylvester equation a y - y b = c by vectorization.  Sizes here
/// are per-vertex operator dimensions, so a dense solve is fine.
inline CMatrix sylvester_solve(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
    const Eigen::Index p = a.rows(), q = b.rows();
    if (p == 0 || q == 0) return CMatrix(p, q);
    CMatrix coef = CMatrix::Zero(p * q, p * q);
    // vec(a y) = (I_q kron a) vec(y); vec(y b) = (b^T kron I_p) vec(y)
    for (Eigen::Index j = 0; j < q; ++j)
        coef.block(j * p, j * p, p, p) = a;
    for (Eigen::Index j = 0; j < q; ++j)
        for (Eigen::Index k = 0; k < q; ++k)
            coef.block(j * p, k * p, p, p).diagonal().array() -= b(k, j);
    CVector rhs(p * q);
    for (Eigen::Index j = 0; j < q; ++j) rhs.segment(j * p, p) = c.col(j);
    CVector y = coef.fullPivLu().solve(rhs);
    CMatrix out(p, q);
    for (Eigen::Index j = 0; j < q; ++j) out.col(j) = y.segment(j * p, p);
    return out;
}

} // namespace detail

/// Spectral (Riesz) projector of t onto the invariant subspace of the
/// eigenvalues accepted by `select`, along the complementary invariant
/// subspace.  The projector is oblique in general.  Throws
/// ClusterGapTooSmall when a selected and a discarded eigenvalue are closer
/// than tol.eig_cluster_gap.
inline CMatrix spectral_projector(const CMatrix& t,
                                  const std::function<bool(Complex)>& select,
                                  const TolerancePolicy& tol = {}) {
    if (t.rows() != t.cols()) throw BadParameter("spectral_projector needs a square matrix");
    const Eigen::Index n = t.rows();
    if (n == 0) return CMatrix(0, 0);
    Eigen::ComplexSchur<CMatrix> schur(t, true);
    if (schur.info() != Eigen::Success)
        throw NumericalFailure("Schur decomposition did not converge");
    CMatrix u = schur.matrixT();
    CMatrix z = schur.matrixU();

    std::vector<bool> sel(n);
    for (Eigen::Index i = 0; i < n; ++i) sel[i] = select(u(i, i));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (sel[i] != sel[j] && std::abs(u(i, i) - u(j, j)) < tol.eig_cluster_gap)
                throw ClusterGapTooSmall("selected and discarded eigenvalues closer than eig_cluster_gap");

    // Bubble the selected eigenvalues to the leading positions.
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!sel[i]) continue;
        for (Eigen::Index j = i; j > k; --j) {
            detail::schur_swap(u, z, j - 1);
            std::swap(sel[j - 1], sel[j]);
        }
        ++k;
    }
    if (k == 0) return CMatrix::Zero(n, n);
    if (k == n) return cidentity(n);

    const CMatrix a = u.topLeftCorner(k, k);
    const CMatrix b = u.bottomRightCorner(n - k, n - k);
    const CMatrix c = u.topRightCorner(k, n - k);
    const CMatrix y = detail::sylvester_solve(a, b, -c);
    CMatrix p = CMatrix::Zero(n, n);
    p.topLeftCorner(k, k) = cidentity(k);
    p.topRightCorner(k, n - k) = -y;
    return z * p * z.adjoint();
}

/// Dimension of the radical of the trace form G_ij = tr(b_i b_j) on the span
/// of the given matrices (a linear basis of a matrix algebra).  By Dickson's
/// characteristic-zero criterion this equals the dimension of the Jacobson
/// radical of the algebra.
inline int gram_nullity(const std::vector<CMatrix>& basis, const TolerancePolicy& tol = {}) {
    const int d = static_cast<int>(basis.size());
    if (d == 0) return 0;
    CMatrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            g(i, j) = (basis[i] * basis[j]).trace();
    return d - rank_svd(g, tol);
}

} // namespace qrep
