/**
 * @file rep.hpp
 * @brief Finite-dimensional Hilbert space representations of quivers and
 *        the intertwiner (Hom) solver.
 *
 * A representation assigns a dimension to every vertex and a complex matrix
 * to every arrow.  Hom(a, b) is the solution space of the linear system
 * T_dst f_alpha = g_alpha T_src over all arrows; it is computed as an
 * orthonormal nullspace basis.  For large tree-shaped representations whose
 * arrows all point toward one root with injective matrices (the shape of the
 * extended Dynkin model representations), the solver eliminates every
 * non-root unknown first, which keeps the dense kernel computation at the
 * size of the root block instead of the whole system.
 */

#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "numerics.hpp"
#include "quiver.hpp"

namespace qrep {

/// A vertex-indexed family of matrices, e.g. one element of Hom(a, b).
using VertexFamily = std::map<std::string, CMatrix>;

struct HilbertRep {
    Quiver quiver;
    std::map<std::string, int> dims;     // vertex -> dimension
    std::map<std::string, CMatrix> mats; // arrow id -> dims[dst] x dims[src]

    int dim(const std::string& v) const {
        auto it = dims.find(v);
        if (it == dims.end()) throw BadInput("no dimension for vertex " + v);
        return it->second;
    }

    const CMatrix& mat(const std::string& arrow_id) const {
        auto it = mats.find(arrow_id);
        if (it == mats.end()) throw BadInput("no matrix for arrow " + arrow_id);
        return it->second;
    }

    int total_dim() const {
        int t = 0;
        for (const auto& [v, d] : dims) t += d;
        return t;
    }

    void validate() const {
        quiver.validate();
        for (const auto& v : quiver.vertices) {
            if (!dims.count(v)) throw BadInput("missing dimension for vertex " + v);
            if (dims.at(v) < 0) throw BadInput("negative dimension at vertex " + v);
        }
        if (dims.size() != quiver.vertices.size()) throw BadInput("dims mention unknown vertices");
        for (const auto& a : quiver.arrows) {
            const CMatrix& m = mat(a.id);
            if (m.rows() != dims.at(a.dst) || m.cols() != dims.at(a.src))
                throw BadInput("matrix shape mismatch on arrow " + a.id);
        }
        if (mats.size() != quiver.arrows.size()) throw BadInput("mats mention unknown arrows");
    }
};

/// Blockwise direct sum.  Vertex spaces are concatenated as a-block then
/// b-block; the same convention fixes the canonical inclusions and
/// projections, which callers reconstruct from a's dimensions.
inline HilbertRep direct_sum(const HilbertRep& a, const HilbertRep& b) {
    if (!(a.quiver == b.quiver)) throw QuiverMismatch("direct sum needs identical quivers");
    HilbertRep out;
    out.quiver = a.quiver;
    for (const auto& v : a.quiver.vertices) out.dims[v] = a.dim(v) + b.dim(v);
    for (const auto& ar : a.quiver.arrows) {
        const CMatrix& fa = a.mat(ar.id);
        const CMatrix& fb = b.mat(ar.id);
        CMatrix m = CMatrix::Zero(fa.rows() + fb.rows(), fa.cols() + fb.cols());
        m.topLeftCorner(fa.rows(), fa.cols()) = fa;
        m.bottomRightCorner(fb.rows(), fb.cols()) = fb;
        out.mats[ar.id] = std::move(m);
    }
    return out;
}

/// Zero representation on q.
inline HilbertRep zero_rep(const Quiver& q) {
    HilbertRep out;
    out.quiver = q;
    for (const auto& v : q.vertices) out.dims[v] = 0;
    for (const auto& a : q.arrows) out.mats[a.id] = CMatrix(0, 0);
    return out;
}

/// Largest intertwiner defect over all arrows: max_alpha |T_dst f - g T_src|.
inline double intertwiner_residual(const HilbertRep& a, const HilbertRep& b,
                                   const VertexFamily& t) {
    double worst = 0.0;
    for (const auto& ar : a.quiver.arrows) {
        const CMatrix lhs = t.at(ar.dst) * a.mat(ar.id);
        const CMatrix rhs = b.mat(ar.id) * t.at(ar.src);
        worst = std::max(worst, (lhs - rhs).norm());
    }
    return worst;
}

namespace detail {

struct VertexLayout {
    std::vector<std::string> order;           // sorted vertex names
    std::map<std::string, int> offset;        // into the stacked unknown vector
    std::map<std::string, std::pair<int, int>> shape;  // rows (b dim), cols (a dim)
    int total = 0;
};

inline VertexLayout hom_layout(const HilbertRep& a, const HilbertRep& b) {
    VertexLayout lay;
    lay.order = a.quiver.vertices;
    for (const auto& v : lay.order) {
        const int r = b.dim(v), c = a.dim(v);
        lay.offset[v] = lay.total;
        lay.shape[v] = {r, c};
        lay.total += r * c;
    }
    return lay;
}

inline VertexFamily unpack_family(const VertexLayout& lay, const CVector& x) {
    VertexFamily fam;
    for (const auto& v : lay.order) {
        auto [r, c] = lay.shape.at(v);
        CMatrix m(r, c);
        for (int j = 0; j < c; ++j) m.col(j) = x.segment(lay.offset.at(v) + j * r, r);
        fam[v] = std::move(m);
    }
    return fam;
}

/// Dense path: stack all intertwiner equations and take the SVD nullspace.
inline std::vector<VertexFamily> hom_basis_dense(const HilbertRep& a, const HilbertRep& b,
                                                 const VertexLayout& lay,
                                                 const TolerancePolicy& tol) {
    int rows = 0;
    for (const auto& ar : a.quiver.arrows) rows += b.dim(ar.dst) * a.dim(ar.src);
    CMatrix sys = CMatrix::Zero(rows, lay.total);
    int row0 = 0;
    for (const auto& ar : a.quiver.arrows) {
        const CMatrix& f = a.mat(ar.id);  // a's matrix: a.dim(dst) x a.dim(src)
        const CMatrix& g = b.mat(ar.id);  // b's matrix: b.dim(dst) x b.dim(src)
        const int br = b.dim(ar.dst), bs = b.dim(ar.src);
        const int as = a.dim(ar.src);
        // vec(T_dst f) = (f^T kron I_br) vec(T_dst)
        for (int j = 0; j < as; ++j)
            for (int k = 0; k < f.rows(); ++k)
                sys.block(row0 + j * br, lay.offset.at(ar.dst) + k * br, br, br)
                    .diagonal().array() += f(k, j);
        // vec(g T_src) = (I_as kron g) vec(T_src)
        for (int j = 0; j < as; ++j)
            sys.block(row0 + j * br, lay.offset.at(ar.src) + j * bs, br, bs) -= g;
        row0 += br * as;
    }
    CMatrix null = kernel_onb(sys, tol);
    std::vector<VertexFamily> out;
    for (Eigen::Index k = 0; k < null.cols(); ++k)
        out.push_back(unpack_family(lay, null.col(k)));
    return out;
}

/// If the quiver is a tree and all arrows point toward a single root along
/// it, return the root; otherwise nullopt.
inline std::optional<std::string> inward_tree_root(const Quiver& q) {
    if (q.arrows.size() + 1 != q.vertices.size()) return std::nullopt;
    UGraph g(q);
    if (!g.connected()) return std::nullopt;
    // every vertex except the root must have exactly one outgoing arrow,
    // and following outgoing arrows from anywhere must reach the root
    std::map<std::string, int> outdeg;
    for (const auto& v : q.vertices) outdeg[v] = 0;
    for (const auto& a : q.arrows) {
        if (a.src == a.dst) return std::nullopt;
        ++outdeg[a.src];
    }
    std::string root;
    for (const auto& [v, d] : outdeg) {
        if (d == 0) {
            if (!root.empty()) return std::nullopt;
            root = v;
        } else if (d != 1) {
            return std::nullopt;
        }
    }
    if (root.empty()) return std::nullopt;
    return root;
}

/// Structured path for inward trees with injective target matrices: every
/// unknown T_v is a linear image of the root unknown, so the nullspace
/// computation happens at root-block size.
inline std::optional<std::vector<VertexFamily>>
hom_basis_tree(const HilbertRep& a, const HilbertRep& b, const VertexLayout& lay,
               const TolerancePolicy& tol) {
    auto root = inward_tree_root(a.quiver);
    if (!root) return std::nullopt;
    for (const auto& ar : a.quiver.arrows)
        if (rank_svd(b.mat(ar.id), tol) != b.dim(ar.src)) return std::nullopt;

    const int nroot = b.dim(*root) * a.dim(*root);
    // expr[v] maps vec(T_root) to vec(T_v); built root-outward
    std::map<std::string, CMatrix> expr;
    expr[*root] = cidentity(nroot);
    std::vector<CMatrix> constraints;

    // order arrows so the destination expression exists before the source's
    std::vector<Arrow> pending = a.quiver.arrows;
    while (!pending.empty()) {
        const size_t before = pending.size();
        for (auto it = pending.begin(); it != pending.end();) {
            if (!expr.count(it->dst)) { ++it; continue; }
            const CMatrix& f = a.mat(it->id);
            const CMatrix& g = b.mat(it->id);
            auto lqi = left_quasi_inverse(g, tol);
            const CMatrix& er = expr.at(it->dst);
            const int br = b.dim(it->dst), bs = b.dim(it->src);
            const int as = a.dim(it->src);
            // vec(T_src) = (f^T kron g^+) vec(T_dst)
            CMatrix es = CMatrix::Zero(bs * as, nroot);
            // constraint: rows of T_dst f outside Im g must vanish:
            // (f^T kron n_g^*) vec(T_dst) = 0 with n_g an onb of (Im g)^perp
            const CMatrix ng = orth_complement_onb(g, tol);
            CMatrix cons = CMatrix::Zero(static_cast<int>(ng.cols()) * as, nroot);
            for (int j = 0; j < as; ++j) {
                CMatrix tf = CMatrix::Zero(br, nroot);  // vec rows of (T_dst f).col(j)
                for (int k = 0; k < f.rows(); ++k)
                    tf += f(k, j) * er.middleRows(k * br, br);
                es.middleRows(j * bs, bs) = lqi.b * tf;
                if (ng.cols() > 0)
                    cons.middleRows(j * static_cast<int>(ng.cols()), static_cast<int>(ng.cols())) =
                        ng.adjoint() * tf;
            }
            expr[it->src] = std::move(es);
            if (cons.rows() > 0) constraints.push_back(std::move(cons));
            it = pending.erase(it);
        }
        if (pending.size() == before) return std::nullopt;  // should not happen
    }

    int crows = 0;
    for (const auto& c : constraints) crows += static_cast<int>(c.rows());
    CMatrix sys(crows, nroot);
    int r0 = 0;
    for (const auto& c : constraints) {
        sys.middleRows(r0, c.rows()) = c;
        r0 += static_cast<int>(c.rows());
    }
    CMatrix null = crows > 0 ? kernel_onb(sys, tol) : cidentity(nroot);

    // reconstruct full families and re-orthonormalize in the stacked metric
    std::vector<CVector> vecs;
    for (Eigen::Index k = 0; k < null.cols(); ++k) {
        CVector x(lay.total);
        for (const auto& v : lay.order)
            x.segment(lay.offset.at(v), expr.at(v).rows()) = expr.at(v) * null.col(k);
        for (const auto& w : vecs) x -= w.dot(x) * w;
        for (const auto& w : vecs) x -= w.dot(x) * w;  // second pass for orthogonality
        const double nrm = x.norm();
        if (nrm < tol.rank_rel_tol) continue;
        vecs.push_back(x / nrm);
    }
    std::vector<VertexFamily> out;
    for (const auto& x : vecs) out.push_back(unpack_family(lay, x));
    return out;
}

} // namespace detail

/// Orthonormal basis of Hom(a, b) = { T : T_dst f_alpha = g_alpha T_src }.
inline std::vector<VertexFamily> hom_basis(const HilbertRep& a, const HilbertRep& b,
                                           const TolerancePolicy& tol = {}) {
    if (!(a.quiver == b.quiver)) throw QuiverMismatch("hom_basis needs identical quivers");
    auto lay = detail::hom_layout(a, b);
    if (lay.total == 0) return {};
    // switch to the structured solver when the dense system would be large
    if (lay.total > 1000) {
        if (auto structured = detail::hom_basis_tree(a, b, lay, tol)) return *structured;
    }
    return detail::hom_basis_dense(a, b, lay, tol);
}

/// dim End(x).
inline int end_dim(const HilbertRep& x, const TolerancePolicy& tol = {}) {
    return static_cast<int>(hom_basis(x, x, tol).size());
}

/// Random search for an invertible intertwiner: Gaussian combinations of a
/// Hom basis, accepted when every vertex block is square and invertible at
/// the rank tolerance.  Deterministic for a fixed seed.
inline std::optional<VertexFamily>
find_isomorphism(const HilbertRep& a, const HilbertRep& b, const TolerancePolicy& tol = {},
                 int trials = 64, std::uint64_t seed = 0x9e3779b97f4a7c15ull) {
    if (!(a.quiver == b.quiver)) throw QuiverMismatch("find_isomorphism needs identical quivers");
    for (const auto& v : a.quiver.vertices)
        if (a.dim(v) != b.dim(v)) return std::nullopt;
    if (a.total_dim() == 0) {
        VertexFamily t;
        for (const auto& v : a.quiver.vertices) t[v] = CMatrix(0, 0);
        return t;
    }
    auto basis = hom_basis(a, b, tol);
    if (basis.empty()) return std::nullopt;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < trials; ++trial) {
        VertexFamily t;
        for (const auto& v : a.quiver.vertices)
            t[v] = CMatrix::Zero(b.dim(v), a.dim(v));
        for (const auto& elt : basis) {
            const Complex c(gauss(rng), gauss(rng));
            for (auto& [v, m] : t) m += c * elt.at(v);
        }
        bool ok = true;
        for (const auto& v : a.quiver.vertices) {
            if (a.dim(v) == 0) continue;
            Eigen::JacobiSVD<CMatrix> svd(t.at(v));
            const auto& sv = svd.singularValues();
            if (sv(0) <= 0.0 || sv(sv.size() - 1) <= tol.rank_rel_tol * sv(0)) {
                ok = false;
                break;
            }
        }
        if (ok) return t;
    }
    return std::nullopt;
}

/// Extend x along an embedding of its quiver into q_super: mapped vertices
/// and arrows keep their data, everything else gets dimension zero.
/// vmap/amap send x's vertex and arrow ids to q_super's.
inline HilbertRep pad_to_supergraph(const HilbertRep& x, const Quiver& q_super,
                                    const std::map<std::string, std::string>& vmap,
                                    const std::map<std::string, std::string>& amap) {
    q_super.validate();
    std::set<std::string> used_v, used_a;
    for (const auto& v : x.quiver.vertices) {
        auto it = vmap.find(v);
        if (it == vmap.end()) throw BadEmbedding("vertex " + v + " not mapped");
        if (!q_super.has_vertex(it->second)) throw BadEmbedding("image vertex missing: " + it->second);
        if (!used_v.insert(it->second).second) throw BadEmbedding("vertex map not injective");
    }
    for (const auto& a : x.quiver.arrows) {
        auto it = amap.find(a.id);
        if (it == amap.end()) throw BadEmbedding("arrow " + a.id + " not mapped");
        const Arrow& img = q_super.arrow(it->second);
        if (img.src != vmap.at(a.src) || img.dst != vmap.at(a.dst))
            throw BadEmbedding("arrow map does not preserve incidence on " + a.id);
        if (!used_a.insert(img.id).second) throw BadEmbedding("arrow map not injective");
    }
    HilbertRep out = zero_rep(q_super);
    for (const auto& v : x.quiver.vertices) out.dims[vmap.at(v)] = x.dim(v);
    for (const auto& a : q_super.arrows)
        out.mats[a.id] = CMatrix::Zero(out.dims.at(a.dst), out.dims.at(a.src));
    for (const auto& a : x.quiver.arrows) out.mats[amap.at(a.id)] = x.mat(a.id);
    return out;
}

/// Pure renaming of vertices and arrows (a special case of padding onto the
/// renamed quiver itself).
inline HilbertRep rename(const HilbertRep& x,
                         const std::map<std::string, std::string>& vmap,
                         const std::map<std::string, std::string>& amap) {
    Quiver q;
    for (const auto& v : x.quiver.vertices) q.vertices.push_back(vmap.at(v));
    for (const auto& a : x.quiver.arrows)
        q.arrows.push_back({amap.at(a.id), vmap.at(a.src), vmap.at(a.dst), a.flipped});
    q.normalize();
    return pad_to_supergraph(x, q, vmap, amap);
}

} // namespace qrep
