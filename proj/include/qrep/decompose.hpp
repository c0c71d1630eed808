/**
 * @file decompose.hpp
 * @brief Indecomposability certification and constructive splitting.
 *
 * A representation is indecomposable exactly when its endomorphism algebra
 * contains no idempotent other than 0 and the identity.  The certified test
 * used here is algebraic: with d = dim End(x) and r the radical dimension of
 * the trace form on End(x), the semisimple quotient is C iff d - r == 1.
 * When the answer is "no", a concrete nontrivial idempotent is found by
 * taking spectral projectors of random endomorphisms, clustering the joint
 * spectrum of all vertex blocks; idempotents here are oblique in general,
 * orthogonal projections are not enough.
 */

#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rep.hpp"

namespace qrep {

struct IdempotentWitness {
    VertexFamily p;          // idempotent endomorphism, nontrivial
    double idem_residual;    // |p^2 - p|
    double intertwine_residual;
};

struct IndecomposabilityVerdict {
    bool indecomposable = false;
    int end_dim = 0;
    int radical_dim = 0;
    bool marginal = false;  // rank decision close to the tolerance cutoff
    std::optional<IdempotentWitness> witness;
};

namespace detail {

inline CMatrix family_gram(const std::vector<VertexFamily>& basis) {
    const int d = static_cast<int>(basis.size());
    CMatrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Complex s(0, 0);
            for (const auto& [v, m] : basis[i]) s += (m * basis[j].at(v)).trace();
            g(i, j) = s;
        }
    return g;
}

inline double family_norm(const VertexFamily& t) {
    double s = 0;
    for (const auto& [v, m] : t) s += m.squaredNorm();
    return std::sqrt(s);
}

inline int family_trace_rank(const VertexFamily& p, const TolerancePolicy& tol) {
    int r = 0;
    for (const auto& [v, m] : p) r += rank_svd(m, tol);
    return r;
}

} // namespace detail

/// Search for a nontrivial idempotent in End(x).  Each trial draws a random
/// Gaussian combination of the Hom basis, clusters the union of the
/// eigenvalues of all vertex blocks with gap tol.eig_cluster_gap, and takes
/// the Riesz projector of one cluster at every vertex simultaneously (so the
/// resulting family is a holomorphic function of one endomorphism and stays
/// in End(x)).  Returns nullopt after `trials` failures.
inline std::optional<IdempotentWitness>
find_idempotent(const HilbertRep& x, const TolerancePolicy& tol = {},
                int trials = 256, std::uint64_t seed = 0x51d67f3a2b4c9e01ull) {
    auto basis = hom_basis(x, x, tol);
    if (basis.size() < 2) return std::nullopt;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int trial = 0; trial < trials; ++trial) {
        VertexFamily t;
        for (const auto& v : x.quiver.vertices)
            t[v] = CMatrix::Zero(x.dim(v), x.dim(v));
        for (const auto& elt : basis) {
            const Complex c(gauss(rng), gauss(rng));
            for (auto& [v, m] : t) m += c * elt.at(v);
        }

        // joint spectrum over all vertex blocks
        std::vector<Complex> eigs;
        for (const auto& [v, m] : t) {
            if (m.rows() == 0) continue;
            Eigen::ComplexEigenSolver<CMatrix> es(m, false);
            if (es.info() != Eigen::Success) continue;
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
                eigs.push_back(es.eigenvalues()(i));
        }
        if (eigs.size() < 2) return std::nullopt;

        // single-linkage clustering at the gap threshold
        const int n = static_cast<int>(eigs.size());
        std::vector<int> cluster(n, -1);
        int nclusters = 0;
        for (int i = 0; i < n; ++i) {
            if (cluster[i] != -1) continue;
            cluster[i] = nclusters;
            std::vector<int> frontier = {i};
            while (!frontier.empty()) {
                int a = frontier.back();
                frontier.pop_back();
                for (int b = 0; b < n; ++b)
                    if (cluster[b] == -1 && std::abs(eigs[a] - eigs[b]) < 2 * tol.eig_cluster_gap) {
                        cluster[b] = nclusters;
                        frontier.push_back(b);
                    }
            }
            ++nclusters;
        }
        if (nclusters < 2) continue;

        // pick the cluster containing the lexicographically smallest eigenvalue
        int pick = 0;
        Complex best = eigs[0];
        for (int i = 1; i < n; ++i) {
            if (eigs[i].real() < best.real() ||
                (eigs[i].real() == best.real() && eigs[i].imag() < best.imag())) {
                best = eigs[i];
                pick = i;
            }
        }
        const int chosen = cluster[pick];
        auto select = [&](Complex lam) {
            int nearest = -1;
            double dist = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                const double d = std::abs(lam - eigs[i]);
                if (d < dist) { dist = d; nearest = i; }
            }
            return cluster[nearest] == chosen;
        };

        VertexFamily p;
        bool ok = true;
        try {
            for (const auto& [v, m] : t)
                p[v] = m.rows() == 0 ? CMatrix(0, 0) : spectral_projector(m, select, tol);
        } catch (const ClusterGapTooSmall&) {
            ok = false;
        } catch (const NumericalFailure&) {
            ok = false;
        }
        if (!ok) continue;

        IdempotentWitness w;
        double idem = 0, total_trace = 0, dim_total = 0;
        for (const auto& [v, m] : p) {
            idem = std::max(idem, (m * m - m).norm());
            total_trace += m.trace().real();
            dim_total += static_cast<double>(m.rows());
        }
        w.idem_residual = idem;
        w.intertwine_residual = intertwiner_residual(x, x, p);
        if (idem > tol.residual_tol || w.intertwine_residual > tol.residual_tol) continue;
        if (total_trace < 0.5 || total_trace > dim_total - 0.5) continue;  // trivial
        w.p = std::move(p);
        return w;
    }
    return std::nullopt;
}

/// Certified indecomposability test via the trace-form radical of End(x).
/// Decomposable verdicts come with a concrete idempotent witness when the
/// random search succeeds.
inline IndecomposabilityVerdict is_indecomposable(const HilbertRep& x,
                                                  const TolerancePolicy& tol = {},
                                                  int witness_trials = 256,
                                                  std::uint64_t seed = 0x51d67f3a2b4c9e01ull) {
    x.validate();
    IndecomposabilityVerdict out;
    if (x.total_dim() == 0) {
        out.indecomposable = false;  // the zero representation is not indecomposable
        return out;
    }
    auto basis = hom_basis(x, x, tol);
    out.end_dim = static_cast<int>(basis.size());
    const CMatrix g = detail::family_gram(basis);
    const int rank = rank_svd(g, tol);
    out.radical_dim = out.end_dim - rank;
    out.indecomposable = (out.end_dim - out.radical_dim == 1);

    if (out.end_dim > 0) {
        Eigen::JacobiSVD<CMatrix> svd(g);
        const auto& sv = svd.singularValues();
        const double cut = tol.rank_rel_tol * sv(0);
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > cut / 10 && sv(i) < cut * 10 && sv(0) > 0) out.marginal = true;
    }
    if (!out.indecomposable)
        out.witness = find_idempotent(x, tol, witness_trials, seed);
    return out;
}

/// One step of a direct sum decomposition along an idempotent p in End(x):
/// x ~= (Im p part) + (Im (1-p) part), with the isomorphism realizing the
/// oblique splitting H_v = Im p_v + Im (1-p_v) in orthonormal coordinates.
struct SplitResult {
    HilbertRep a;  // restriction to Im p
    HilbertRep b;  // restriction to Im (1-p)
    VertexFamily iso;  // x -> direct_sum(a, b)
    double residual;
};

inline SplitResult split_by_idempotent(const HilbertRep& x, const VertexFamily& p,
                                       const TolerancePolicy& tol = {}) {
    SplitResult out;
    out.a.quiver = out.b.quiver = x.quiver;
    std::map<std::string, CMatrix> ca, cb;  // orthonormal bases of the two images
    for (const auto& v : x.quiver.vertices) {
        const CMatrix& pv = p.at(v);
        if (pv.rows() != x.dim(v) || pv.cols() != x.dim(v))
            throw BadParameter("idempotent block shape mismatch at vertex " + v);
        const CMatrix qv = cidentity(pv.rows()) - pv;
        ca[v] = image_onb(pv, tol);
        cb[v] = image_onb(qv, tol);
        if (ca[v].cols() + cb[v].cols() != pv.rows())
            throw DegenerateIdempotent("rank p + rank (1-p) != dim at vertex " + v);
        out.a.dims[v] = static_cast<int>(ca[v].cols());
        out.b.dims[v] = static_cast<int>(cb[v].cols());
    }
    for (const auto& ar : x.quiver.arrows) {
        const CMatrix& f = x.mat(ar.id);
        out.a.mats[ar.id] = ca[ar.dst].adjoint() * f * ca[ar.src];
        out.b.mats[ar.id] = cb[ar.dst].adjoint() * f * cb[ar.src];
    }
    double worst = 0;
    for (const auto& v : x.quiver.vertices) {
        const CMatrix& pv = p.at(v);
        CMatrix phi(out.a.dims[v] + out.b.dims[v], x.dim(v));
        phi.topRows(out.a.dims[v]) = ca[v].adjoint() * pv;
        phi.bottomRows(out.b.dims[v]) = cb[v].adjoint() * (cidentity(pv.rows()) - pv);
        out.iso[v] = std::move(phi);
    }
    const HilbertRep sum = direct_sum(out.a, out.b);
    worst = intertwiner_residual(x, sum, out.iso);
    out.residual = worst;
    if (worst > tol.residual_tol)
        throw NumericalFailure("splitting isomorphism residual too large");
    return out;
}

/// Full recursive decomposition into (numerically) indecomposable summands
/// with an accumulated isomorphism x -> summand_1 + ... + summand_k.
struct DecompositionResult {
    std::vector<HilbertRep> summands;
    VertexFamily iso;
    double residual = 0;
    std::vector<std::string> log;  // one entry per split or certification event
};

namespace detail {

inline void decompose_rec(const HilbertRep& x, const TolerancePolicy& tol, int trials,
                          std::uint64_t seed, int depth, DecompositionResult& out,
                          std::vector<HilbertRep>& summands, VertexFamily& iso) {
    if (depth > 64) throw NumericalFailure("decomposition recursion limit exceeded");
    if (x.total_dim() == 0) return;  // zero summands are dropped
    auto verdict = is_indecomposable(x, tol, trials, seed + depth);
    if (verdict.indecomposable || !verdict.witness) {
        if (!verdict.indecomposable)
            out.log.push_back("no idempotent found after trials; keeping summand as is");
        summands.push_back(x);
        iso.clear();
        for (const auto& v : x.quiver.vertices) iso[v] = cidentity(x.dim(v));
        return;
    }
    out.log.push_back("split with end_dim=" + std::to_string(verdict.end_dim) +
                      " radical_dim=" + std::to_string(verdict.radical_dim));
    auto split = split_by_idempotent(x, verdict.witness->p, tol);
    std::vector<HilbertRep> sa, sb;
    VertexFamily ia, ib;
    decompose_rec(split.a, tol, trials, seed * 6364136223846793005ull + 1, depth + 1, out, sa, ia);
    decompose_rec(split.b, tol, trials, seed * 6364136223846793005ull + 2, depth + 1, out, sb, ib);
    summands = sa;
    summands.insert(summands.end(), sb.begin(), sb.end());
    iso.clear();
    for (const auto& v : x.quiver.vertices) {
        const Eigen::Index ra = ia.count(v) ? ia.at(v).rows() : 0;
        const Eigen::Index rb = ib.count(v) ? ib.at(v).rows() : 0;
        CMatrix refine = CMatrix::Zero(ra + rb, split.a.dim(v) + split.b.dim(v));
        if (ra > 0) refine.topLeftCorner(ra, split.a.dim(v)) = ia.at(v);
        if (rb > 0) refine.bottomRightCorner(rb, split.b.dim(v)) = ib.at(v);
        iso[v] = refine * split.iso.at(v);
    }
}

} // namespace detail

inline DecompositionResult decompose_fully(const HilbertRep& x, const TolerancePolicy& tol = {},
                                           int trials = 256,
                                           std::uint64_t seed = 0x51d67f3a2b4c9e01ull) {
    x.validate();
    DecompositionResult out;
    VertexFamily iso;
    detail::decompose_rec(x, tol, trials, seed, 0, out, out.summands, iso);
    out.iso = std::move(iso);
    if (out.summands.empty()) {
        out.residual = 0;
        for (const auto& v : x.quiver.vertices) out.iso[v] = CMatrix(0, x.dim(v));
        return out;
    }
    HilbertRep sum = out.summands[0];
    for (size_t i = 1; i < out.summands.size(); ++i) sum = direct_sum(sum, out.summands[i]);
    out.residual = intertwiner_residual(x, sum, out.iso);
    return out;
}

} // namespace qrep
