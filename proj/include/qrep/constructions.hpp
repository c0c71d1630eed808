/**
 * @file constructions.hpp
 * @brief Model indecomposable representations on extended Dynkin quivers at
 *        finite truncation, and the positive-unitary diagonal calculus on
 *        path quivers.
 *
 * All models are built from K = C^N and the truncated shift s = shift(N)
 * (ones on the first subdiagonal), optionally shifted by a complex lambda.
 * Subspace models are realized through orthonormal column bases; an arrow
 * between nested subspaces carries the inclusion expressed in those bases.
 */

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reflect.hpp"

namespace qrep {

/// Truncated unilateral shift on C^N: e_k -> e_{k+1}, e_N -> 0.
inline CMatrix truncated_shift(int N) {
    if (N < 1) throw BadParameter("truncation order must be at least 1");
    CMatrix s = CMatrix::Zero(N, N);
    for (int i = 1; i < N; ++i) s(i, i - 1) = 1.0;
    return s;
}

namespace detail {

/// Orthonormalize the columns of a full-column-rank generator matrix.
inline CMatrix onb_cols(const CMatrix& gens, const TolerancePolicy& tol = {}) {
    if (gens.cols() == 0) return gens;
    if (rank_svd(gens, tol) != gens.cols())
        throw NumericalFailure("subspace generators are not linearly independent");
    Eigen::HouseholderQR<CMatrix> qr(gens);
    CMatrix q = qr.householderQ() * CMatrix::Identity(gens.rows(), gens.cols());
    return q;
}

/// Matrix of the inclusion of span(msrc) into span(mdst), both given by
/// orthonormal column bases; verifies containment.
inline CMatrix inclusion(const CMatrix& mdst, const CMatrix& msrc, const TolerancePolicy& tol = {}) {
    CMatrix f = mdst.adjoint() * msrc;
    const double defect = (mdst * f - msrc).norm();
    if (defect > tol.residual_tol * std::max(1.0, msrc.norm()))
        throw NumericalFailure("claimed subspace inclusion does not hold");
    return f;
}

/// Stack vertical blocks.
inline CMatrix vcat(const std::vector<CMatrix>& blocks) {
    Eigen::Index rows = 0, cols = blocks.empty() ? 0 : blocks[0].cols();
    for (const auto& b : blocks) rows += b.rows();
    CMatrix out(rows, cols);
    Eigen::Index r0 = 0;
    for (const auto& b : blocks) {
        out.middleRows(r0, b.rows()) = b;
        r0 += b.rows();
    }
    return out;
}

} // namespace detail

enum class ExampleKind {
    A0Loop,       // one vertex, one loop, matrix s + lambda
    AnTilde,      // directed (n+1)-cycle, s + lambda on one arrow, identity elsewhere
    D4FourSpace,  // four subspace configuration in K + K
    DnTilde,      // two hubs joined by an identity path, four leaf subspaces
    E6Tilde,
    E6TildeAlt,   // same quiver as E6Tilde, inequivalent subspace configuration
    E7Tilde,
    E8Tilde,
};

inline ExampleKind example_kind_from_string(const std::string& s) {
    if (s == "a0_loop") return ExampleKind::A0Loop;
    if (s == "an_tilde") return ExampleKind::AnTilde;
    if (s == "d4_fourspace") return ExampleKind::D4FourSpace;
    if (s == "dn_tilde") return ExampleKind::DnTilde;
    if (s == "e6_tilde") return ExampleKind::E6Tilde;
    if (s == "e6_tilde_alt") return ExampleKind::E6TildeAlt;
    if (s == "e7_tilde") return ExampleKind::E7Tilde;
    if (s == "e8_tilde") return ExampleKind::E8Tilde;
    throw BadParameter("unknown example kind: " + s);
}

namespace detail {

inline Quiver make_quiver(std::vector<std::string> vs, std::vector<Arrow> as) {
    Quiver q;
    q.vertices = std::move(vs);
    q.arrows = std::move(as);
    q.normalize();
    q.validate();
    return q;
}

/// Shared builder for the subspace-configuration models: takes the ambient
/// multiplicity (ambient = K^mult), subspace bases per vertex ("0" denotes
/// the ambient vertex), and the arrow list; arrows into "0" carry the basis
/// itself, arrows between subspaces carry verified inclusions.
inline HilbertRep subspace_rep(int N, int mult, const std::map<std::string, CMatrix>& bases,
                               const std::vector<Arrow>& arrows,
                               const TolerancePolicy& tol = {}) {
    std::vector<std::string> vs = {"0"};
    for (const auto& [v, b] : bases) vs.push_back(v);
    HilbertRep x;
    x.quiver = make_quiver(vs, arrows);
    x.dims["0"] = N * mult;
    for (const auto& [v, b] : bases) x.dims[v] = static_cast<int>(b.cols());
    for (const auto& a : x.quiver.arrows) {
        if (a.dst == "0")
            x.mats[a.id] = bases.at(a.src);
        else
            x.mats[a.id] = inclusion(bases.at(a.dst), bases.at(a.src), tol);
    }
    x.validate();
    return x;
}

} // namespace detail

/// Four subspace configuration on the star with central vertex 0: two
/// coordinate axes, the graph of a, and the diagonal, inside K + K.
inline HilbertRep build_d4_fourspace(int N, const CMatrix& a, const TolerancePolicy& tol = {}) {
    if (a.rows() != N || a.cols() != N) throw BadParameter("operator must be N x N");
    const CMatrix id = cidentity(N), zero = CMatrix::Zero(N, N);
    std::map<std::string, CMatrix> bases;
    bases["1"] = detail::vcat({id, zero});
    bases["2"] = detail::vcat({zero, id});
    bases["3"] = detail::onb_cols(detail::vcat({id, a}), tol);
    bases["4"] = detail::onb_cols(detail::vcat({id, id}), tol);
    return detail::subspace_rep(N, 2, bases,
                                {{"a1", "1", "0"}, {"a2", "2", "0"}, {"a3", "3", "0"}, {"a4", "4", "0"}},
                                tol);
}

/// Main entry point for the model representations.  N is the truncation
/// order, lambda shifts the truncated shift, n sizes the A~ and D~ families.
inline HilbertRep build_example(ExampleKind kind, int N, Complex lambda = Complex(0, 0),
                                int n = 0, const TolerancePolicy& tol = {}) {
    if (N < 1) throw BadParameter("truncation order must be at least 1");
    const CMatrix s = truncated_shift(N) + lambda * cidentity(N);
    const CMatrix id = cidentity(N), zero = CMatrix::Zero(N, N);

    switch (kind) {
    case ExampleKind::A0Loop: {
        HilbertRep x;
        x.quiver = detail::make_quiver({"1"}, {{"a1", "1", "1"}});
        x.dims["1"] = N;
        x.mats["a1"] = s;
        return x;
    }
    case ExampleKind::AnTilde: {
        if (n < 1) throw BadParameter("an_tilde needs n >= 1");
        std::vector<std::string> vs;
        std::vector<Arrow> as;
        auto name = [](int k) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "%02d", k);
            return std::string(buf);
        };
        for (int k = 1; k <= n + 1; ++k) vs.push_back(name(k));
        for (int k = 1; k <= n + 1; ++k)
            as.push_back({"a" + name(k), name(k), name(k == n + 1 ? 1 : k + 1)});
        HilbertRep x;
        x.quiver = detail::make_quiver(vs, as);
        for (const auto& v : vs) x.dims[v] = N;
        for (const auto& a : x.quiver.arrows) x.mats[a.id] = id;
        x.mats["a" + name(1)] = s;
        return x;
    }
    case ExampleKind::D4FourSpace:
        return build_d4_fourspace(N, s, tol);
    case ExampleKind::DnTilde: {
        if (n < 5) throw BadParameter("dn_tilde needs n >= 5 (use d4_fourspace for n = 4)");
        // hubs "5" and std::to_string(n+1), joined by an identity path
        std::vector<std::string> vs = {"1", "2", "3", "4"};
        std::vector<Arrow> as = {{"a1", "1", "5"},
                                 {"a2", "2", "5"},
                                 {"a3", "3", std::to_string(n + 1)},
                                 {"a4", "4", std::to_string(n + 1)}};
        for (int k = 5; k <= n + 1; ++k) vs.push_back(std::to_string(k));
        for (int k = 5; k <= n; ++k)
            as.push_back({"p" + std::to_string(k), std::to_string(k), std::to_string(k + 1)});
        HilbertRep x;
        x.quiver = detail::make_quiver(vs, as);
        for (int k = 1; k <= 4; ++k) x.dims[std::to_string(k)] = N;
        for (int k = 5; k <= n + 1; ++k) x.dims[std::to_string(k)] = 2 * N;
        std::map<std::string, CMatrix> bases;
        bases["1"] = detail::vcat({id, zero});
        bases["2"] = detail::vcat({zero, id});
        bases["3"] = detail::onb_cols(detail::vcat({id, s}), tol);
        bases["4"] = detail::onb_cols(detail::vcat({id, id}), tol);
        for (int k = 1; k <= 4; ++k) x.mats["a" + std::to_string(k)] = bases[std::to_string(k)];
        for (int k = 5; k <= n; ++k) x.mats["p" + std::to_string(k)] = cidentity(2 * N);
        x.validate();
        return x;
    }
    case ExampleKind::E6Tilde: {
        std::map<std::string, CMatrix> bases;
        CMatrix m1(3 * N, 2 * N);
        m1.setZero();
        m1.block(0, 0, N, N) = id;
        m1.block(2 * N, N, N, N) = id;
        bases["1"] = m1;                                     // K + 0 + K
        bases["2"] = detail::vcat({zero, zero, id});         // 0 + 0 + K
        CMatrix m1p(3 * N, 2 * N);
        m1p.setZero();
        m1p.block(0, 0, N, N) = id;
        m1p.block(N, N, N, N) = id;
        bases["1'"] = m1p;                                   // K + K + 0
        bases["2'"] = detail::vcat({zero, id, zero});        // 0 + K + 0
        CMatrix g(3 * N, 2 * N);                             // {(x,x,x) + (y, s y, 0)}
        g.setZero();
        g.block(0, 0, N, N) = id;
        g.block(N, 0, N, N) = id;
        g.block(2 * N, 0, N, N) = id;
        g.block(0, N, N, N) = id;
        g.block(N, N, N, N) = s;
        bases["1''"] = detail::onb_cols(g, tol);
        bases["2''"] = detail::onb_cols(detail::vcat({id, id, id}), tol);  // diagonal
        return detail::subspace_rep(N, 3, bases,
                                    {{"b1", "1", "0"}, {"b2", "2", "1"},
                                     {"c1", "1'", "0"}, {"c2", "2'", "1'"},
                                     {"d1", "1''", "0"}, {"d2", "2''", "1''"}},
                                    tol);
    }
    case ExampleKind::E6TildeAlt: {
        std::map<std::string, CMatrix> bases;
        CMatrix l1(3 * N, 2 * N);
        l1.setZero();
        l1.block(N, 0, N, N) = id;
        l1.block(2 * N, N, N, N) = id;
        bases["1"] = l1;                                     // 0 + K + K
        bases["2"] = detail::onb_cols(detail::vcat({zero, id, s}), tol);  // 0 + graph(s)
        CMatrix l1p(3 * N, 2 * N);
        l1p.setZero();
        l1p.block(0, 0, N, N) = id;
        l1p.block(N, N, N, N) = id;
        bases["1'"] = l1p;                                   // K + K + 0
        bases["2'"] = detail::onb_cols(detail::vcat({id, id, zero}), tol);  // diag + 0
        CMatrix l1pp(3 * N, 2 * N);
        l1pp.setZero();
        l1pp.block(0, 0, N, N) = id;
        l1pp.block(2 * N, N, N, N) = id;
        bases["1''"] = l1pp;                                 // K + 0 + K
        bases["2''"] = detail::onb_cols(detail::vcat({id, zero, id}), tol);  // {(x,0,x)}
        return detail::subspace_rep(N, 3, bases,
                                    {{"b1", "1", "0"}, {"b2", "2", "1"},
                                     {"c1", "1'", "0"}, {"c2", "2'", "1'"},
                                     {"d1", "1''", "0"}, {"d2", "2''", "1''"}},
                                    tol);
    }
    case ExampleKind::E7Tilde: {
        std::map<std::string, CMatrix> bases;
        auto unit_block = [&](int mult, std::vector<int> slots) {
            CMatrix m = CMatrix::Zero(mult * N, static_cast<int>(slots.size()) * N);
            for (size_t j = 0; j < slots.size(); ++j)
                m.block(slots[j] * N, static_cast<int>(j) * N, N, N) = id;
            return m;
        };
        bases["1"] = unit_block(4, {0, 2, 3});               // K + 0 + K + K
        CMatrix m2 = CMatrix::Zero(4 * N, 2 * N);            // K + 0 + {(x,x)}
        m2.block(0, 0, N, N) = id;
        m2.block(2 * N, N, N, N) = id;
        m2.block(3 * N, N, N, N) = id;
        bases["2"] = detail::onb_cols(m2, tol);
        bases["3"] = unit_block(4, {0});
        bases["1'"] = unit_block(4, {1, 2, 3});              // 0 + K + K + K
        CMatrix m2p = CMatrix::Zero(4 * N, 2 * N);           // 0 + K + {(y, s y)}
        m2p.block(N, 0, N, N) = id;
        m2p.block(2 * N, N, N, N) = id;
        m2p.block(3 * N, N, N, N) = s;
        bases["2'"] = detail::onb_cols(m2p, tol);
        bases["3'"] = unit_block(4, {1});
        CMatrix m1pp = CMatrix::Zero(4 * N, 2 * N);          // {(x, y, x, y)}
        m1pp.block(0, 0, N, N) = id;
        m1pp.block(2 * N, 0, N, N) = id;
        m1pp.block(N, N, N, N) = id;
        m1pp.block(3 * N, N, N, N) = id;
        bases["1''"] = detail::onb_cols(m1pp, tol);
        return detail::subspace_rep(N, 4, bases,
                                    {{"b1", "1", "0"}, {"b2", "2", "1"}, {"b3", "3", "2"},
                                     {"c1", "1'", "0"}, {"c2", "2'", "1'"}, {"c3", "3'", "2'"},
                                     {"d1", "1''", "0"}},
                                    tol);
    }
    case ExampleKind::E8Tilde: {
        std::map<std::string, CMatrix> bases;
        auto unit_block = [&](std::vector<int> slots) {
            CMatrix m = CMatrix::Zero(6 * N, static_cast<int>(slots.size()) * N);
            for (size_t j = 0; j < slots.size(); ++j)
                m.block(slots[j] * N, static_cast<int>(j) * N, N, N) = id;
            return m;
        };
        CMatrix m1 = CMatrix::Zero(6 * N, 5 * N);            // {(x,x)} + K^4
        m1.block(0, 0, N, N) = id;
        m1.block(N, 0, N, N) = id;
        for (int j = 0; j < 4; ++j) m1.block((2 + j) * N, (1 + j) * N, N, N) = id;
        bases["1"] = detail::onb_cols(m1, tol);
        bases["2"] = unit_block({2, 3, 4, 5});               // 0^2 + K^4
        bases["3"] = unit_block({3, 4, 5});                  // 0^3 + K^3
        CMatrix m4 = CMatrix::Zero(6 * N, 2 * N);            // 0^3 + K + {(y, s y)}
        m4.block(3 * N, 0, N, N) = id;
        m4.block(4 * N, N, N, N) = id;
        m4.block(5 * N, N, N, N) = s;
        bases["4"] = detail::onb_cols(m4, tol);
        bases["5"] = unit_block({3});                        // 0^3 + K + 0^2
        CMatrix m1p = CMatrix::Zero(6 * N, 4 * N);           // K^2 + {(x,y,x,y)}
        m1p.block(0, 0, N, N) = id;
        m1p.block(N, N, N, N) = id;
        m1p.block(2 * N, 2 * N, N, N) = id;
        m1p.block(4 * N, 2 * N, N, N) = id;
        m1p.block(3 * N, 3 * N, N, N) = id;
        m1p.block(5 * N, 3 * N, N, N) = id;
        bases["1'"] = detail::onb_cols(m1p, tol);
        bases["2'"] = unit_block({0, 1});                    // K^2 + 0^4
        CMatrix m1pp = CMatrix::Zero(6 * N, 3 * N);          // {(y,z,x,0,y,z)}
        m1pp.block(0, 0, N, N) = id;
        m1pp.block(4 * N, 0, N, N) = id;
        m1pp.block(N, N, N, N) = id;
        m1pp.block(5 * N, N, N, N) = id;
        m1pp.block(2 * N, 2 * N, N, N) = id;
        bases["1''"] = detail::onb_cols(m1pp, tol);
        return detail::subspace_rep(N, 6, bases,
                                    {{"b1", "1", "0"}, {"b2", "2", "1"}, {"b3", "3", "2"},
                                     {"b4", "4", "3"}, {"b5", "5", "4"},
                                     {"c1", "1'", "0"}, {"c2", "2'", "1'"},
                                     {"d1", "1''", "0"}},
                                    tol);
    }
    }
    throw BadParameter("unhandled example kind");
}

// ---------------------------------------------------------------------------
// Positive-unitary diagonal representations on path quivers.
// ---------------------------------------------------------------------------

/// Certificate that a path representation is block diagonal with every arrow
/// block either zero or a positive scalar times a unitary.  bases[v][i] has
/// orthonormal columns (possibly zero of them); the blocks of one vertex are
/// mutually orthogonal and jointly span.  labels[arrow][i] is the positive
/// scalar of block i, with 0 marking a zero block.
struct PUDiagonalCert {
    std::map<std::string, std::vector<CMatrix>> bases;
    std::map<std::string, std::vector<double>> labels;

    int block_count() const {
        return bases.empty() ? 0 : static_cast<int>(bases.begin()->second.size());
    }
};

/// Vertex order of a path quiver (underlying graph of type A), endpoints
/// chosen so the first vertex is the lexicographically smaller endpoint.
inline std::vector<std::string> path_order(const Quiver& q) {
    auto cls = underlying_classify(q);
    if (cls.kind != GraphClass::Dynkin || cls.type.empty() || cls.type[0] != 'A')
        throw NotAPathQuiver("underlying graph is not a path");
    if (q.vertices.size() == 1) return {q.vertices[0]};
    std::map<std::string, std::vector<std::string>> nbr;
    for (const auto& a : q.arrows) {
        nbr[a.src].push_back(a.dst);
        nbr[a.dst].push_back(a.src);
    }
    std::vector<std::string> ends;
    for (const auto& v : q.vertices)
        if (nbr[v].size() == 1) ends.push_back(v);
    std::sort(ends.begin(), ends.end());
    std::vector<std::string> order = {ends[0]};
    std::string prev = "";
    while (order.size() < q.vertices.size()) {
        for (const auto& w : nbr[order.back()])
            if (w != prev) {
                prev = order.back();
                order.push_back(w);
                break;
            }
    }
    return order;
}

/// Check a positive-unitary diagonal certificate against a representation.
/// Throws CertInvalid with a description of the first violated condition.
inline void pu_verify(const HilbertRep& x, const PUDiagonalCert& cert,
                      const TolerancePolicy& tol = {}) {
    x.validate();
    path_order(x.quiver);  // throws if not a path
    const int m = cert.block_count();
    for (const auto& v : x.quiver.vertices) {
        auto it = cert.bases.find(v);
        if (it == cert.bases.end() || static_cast<int>(it->second.size()) != m)
            throw CertInvalid("vertex " + v + " missing or with wrong block count");
        int total = 0;
        CMatrix joined(x.dim(v), 0);
        for (const auto& b : it->second) {
            if (b.rows() != x.dim(v)) throw CertInvalid("basis row count mismatch at " + v);
            CMatrix next(x.dim(v), joined.cols() + b.cols());
            next << joined, b;
            joined = std::move(next);
            total += static_cast<int>(b.cols());
        }
        if (total != x.dim(v)) throw CertInvalid("blocks do not span vertex space " + v);
        if (total > 0 && (joined.adjoint() * joined - cidentity(total)).norm() > tol.residual_tol)
            throw CertInvalid("blocks are not jointly orthonormal at " + v);
    }
    for (const auto& a : x.quiver.arrows) {
        auto it = cert.labels.find(a.id);
        if (it == cert.labels.end() || static_cast<int>(it->second.size()) != m)
            throw CertInvalid("arrow " + a.id + " missing or with wrong label count");
        const CMatrix& f = x.mat(a.id);
        const double scale = std::max(1.0, f.norm());
        for (int i = 0; i < m; ++i) {
            const CMatrix& bs = cert.bases.at(a.src)[i];
            for (int j = 0; j < m; ++j) {
                const CMatrix& bd = cert.bases.at(a.dst)[j];
                const CMatrix block = bd.adjoint() * f * bs;
                if (i != j) {
                    if (block.norm() > tol.residual_tol * scale)
                        throw CertInvalid("off diagonal coupling on arrow " + a.id);
                    continue;
                }
                const double lam = it->second[i];
                if (lam < 0) throw CertInvalid("negative label on arrow " + a.id);
                if (lam == 0.0) {
                    if (block.norm() > tol.residual_tol * scale)
                        throw CertInvalid("labelled-zero block is not zero on arrow " + a.id);
                } else {
                    if (block.rows() != block.cols())
                        throw CertInvalid("labelled-unitary block is not square on arrow " + a.id);
                    if ((block.adjoint() * block - lam * lam * cidentity(block.cols())).norm() >
                        tol.residual_tol * scale * std::max(1.0, lam))
                        throw CertInvalid("block is not lambda times unitary on arrow " + a.id);
                }
            }
        }
    }
}

struct PUReflectResult {
    ReflectionOutput refl;
    PUDiagonalCert cert;
};

/// Closed-form source reflection of a positive-unitary diagonal path
/// representation, block by block:
///  - two outgoing positive blocks combine into one positive block whose
///    kernel-space basis mixes the neighbours through the composite unitary;
///  - a positive block against a zero block projects onto the zero side;
///  - two zero blocks split into two independent blocks, one per side;
///  - at a path end, a positive block vanishes and a zero block survives
///    with the identity.
/// The result is verified against the generic reflect_minus up to a unitary
/// change of the reflected vertex basis, and the returned certificate is
/// re-verified.
inline PUReflectResult pu_reflect_minus(const HilbertRep& x, const PUDiagonalCert& cert,
                                        const std::string& v, const TolerancePolicy& tol = {}) {
    pu_verify(x, cert, tol);
    if (!x.quiver.is_source(v)) throw NotASource(v + " is not a source");
    const auto order = path_order(x.quiver);
    const auto pos = std::find(order.begin(), order.end(), v) - order.begin();
    const auto outgoing = x.quiver.arrows_out_of(v);  // sorted by id
    const int m = cert.block_count();

    // which side of v each vertex sits on, for the split case
    std::map<std::string, int> side;  // -1 before v, +1 after v, 0 at v
    for (size_t i = 0; i < order.size(); ++i)
        side[order[i]] = static_cast<long>(i) < pos ? -1 : (static_cast<long>(i) > pos ? +1 : 0);

    struct OutBlock {
        CMatrix wcols;                       // ambient x d, orthonormal
        std::map<std::string, double> glabel;  // reversed arrow id -> label
        int parent;                          // originating block index
        int keep_side;                       // 0 = both sides keep the parent
                                             // block, otherwise only this side
    };
    std::vector<OutBlock> blocks;

    int ambient = 0;
    std::vector<int> offs;
    for (const auto& a : outgoing) {
        offs.push_back(ambient);
        ambient += x.dim(a.dst);
    }

    for (int i = 0; i < m; ++i) {
        const CMatrix& bv = cert.bases.at(v)[i];
        if (outgoing.size() == 1) {
            const auto& a = outgoing[0];
            const double lam = cert.labels.at(a.id)[i];
            const CMatrix& bn = cert.bases.at(a.dst)[i];
            OutBlock ob;
            ob.parent = i;
            ob.keep_side = 0;
            if (lam > 0) {
                ob.wcols = CMatrix(ambient, 0);
                ob.glabel[a.id] = 0.0;
            } else {
                ob.wcols = CMatrix::Zero(ambient, bn.cols());
                ob.wcols.middleRows(offs[0], bn.rows()) = bn;
                ob.glabel[a.id] = bn.cols() > 0 ? 1.0 : 0.0;
            }
            blocks.push_back(std::move(ob));
            continue;
        }
        if (outgoing.size() != 2) throw NotAPathQuiver("source has more than two outgoing arrows");
        const auto& a1 = outgoing[0];
        const auto& a2 = outgoing[1];
        const double l1 = cert.labels.at(a1.id)[i];
        const double l2 = cert.labels.at(a2.id)[i];
        const CMatrix& b1 = cert.bases.at(a1.dst)[i];
        const CMatrix& b2 = cert.bases.at(a2.dst)[i];
        if (l1 > 0 && l2 > 0) {
            const CMatrix u1 = b1.adjoint() * x.mat(a1.id) * bv / l1;
            const CMatrix u2 = b2.adjoint() * x.mat(a2.id) * bv / l2;
            const double sig = l1 * l1 + l2 * l2;
            const double root = std::sqrt(sig);
            OutBlock ob;
            ob.parent = i;
            ob.keep_side = 0;
            ob.wcols = CMatrix::Zero(ambient, bv.cols());
            ob.wcols.middleRows(offs[0], b1.rows()) = b1 * (l2 / root);
            ob.wcols.middleRows(offs[1], b2.rows()) = b2 * (-(l1 / root)) * (u2 * u1.adjoint());
            ob.glabel[a1.id] = l2 / root;
            ob.glabel[a2.id] = l1 / root;
            blocks.push_back(std::move(ob));
        } else if (l1 > 0 && l2 == 0.0) {
            OutBlock ob;
            ob.parent = i;
            ob.keep_side = 0;
            ob.wcols = CMatrix::Zero(ambient, b2.cols());
            ob.wcols.middleRows(offs[1], b2.rows()) = b2;
            ob.glabel[a1.id] = 0.0;
            ob.glabel[a2.id] = b2.cols() > 0 ? 1.0 : 0.0;
            blocks.push_back(std::move(ob));
        } else if (l1 == 0.0 && l2 > 0) {
            OutBlock ob;
            ob.parent = i;
            ob.keep_side = 0;
            ob.wcols = CMatrix::Zero(ambient, b1.cols());
            ob.wcols.middleRows(offs[0], b1.rows()) = b1;
            ob.glabel[a1.id] = b1.cols() > 0 ? 1.0 : 0.0;
            ob.glabel[a2.id] = 0.0;
            blocks.push_back(std::move(ob));
        } else {
            // both zero: the kernel space is the whole ambient block pair,
            // split into one block per side so every piece stays scalar
            OutBlock left, right;
            left.parent = right.parent = i;
            left.keep_side = side.at(a1.dst);
            right.keep_side = side.at(a2.dst);
            left.wcols = CMatrix::Zero(ambient, b1.cols());
            left.wcols.middleRows(offs[0], b1.rows()) = b1;
            left.glabel[a1.id] = b1.cols() > 0 ? 1.0 : 0.0;
            left.glabel[a2.id] = 0.0;
            right.wcols = CMatrix::Zero(ambient, b2.cols());
            right.wcols.middleRows(offs[1], b2.rows()) = b2;
            right.glabel[a1.id] = 0.0;
            right.glabel[a2.id] = b2.cols() > 0 ? 1.0 : 0.0;
            blocks.push_back(std::move(left));
            blocks.push_back(std::move(right));
        }
    }

    // assemble the reflected representation in the closed-form basis
    int k = 0;
    for (const auto& ob : blocks) k += static_cast<int>(ob.wcols.cols());
    CMatrix w(ambient, k);
    std::vector<int> bstart(blocks.size());
    {
        int c0 = 0;
        for (size_t b = 0; b < blocks.size(); ++b) {
            bstart[b] = c0;
            w.middleCols(c0, blocks[b].wcols.cols()) = blocks[b].wcols;
            c0 += static_cast<int>(blocks[b].wcols.cols());
        }
    }

    PUReflectResult out;
    out.refl.vertex = v;
    out.refl.sign = -1;
    out.refl.vertex_basis = w;
    out.refl.rep.quiver = reflect_orientation(x.quiver, v, -1);
    out.refl.rep.dims = x.dims;
    out.refl.rep.dims[v] = k;
    for (size_t j = 0; j < outgoing.size(); ++j) {
        out.refl.ambient_arrows.push_back(outgoing[j].id);
        out.refl.block_offsets.push_back(offs[j]);
        out.refl.rep.mats[outgoing[j].id] =
            w.middleRows(offs[j], x.dim(outgoing[j].dst)).adjoint();
    }
    for (const auto& a : x.quiver.arrows)
        if (a.src != v) out.refl.rep.mats[a.id] = x.mat(a.id);

    // certificate for the reflected representation
    for (const auto& u : x.quiver.vertices) {
        auto& list = out.cert.bases[u];
        for (size_t b = 0; b < blocks.size(); ++b) {
            if (u == v) {
                CMatrix slice = CMatrix::Zero(k, blocks[b].wcols.cols());
                slice.middleRows(bstart[b], blocks[b].wcols.cols()) =
                    cidentity(blocks[b].wcols.cols());
                list.push_back(std::move(slice));
            } else if (blocks[b].keep_side == 0 || blocks[b].keep_side == side.at(u)) {
                list.push_back(cert.bases.at(u)[blocks[b].parent]);
            } else {
                list.push_back(CMatrix(x.dim(u), 0));
            }
        }
    }
    for (const auto& a : out.refl.rep.quiver.arrows) {
        auto& lab = out.cert.labels[a.id];
        const bool reversed = (a.src != v && a.dst == v);
        for (size_t b = 0; b < blocks.size(); ++b) {
            if (reversed) {
                lab.push_back(blocks[b].glabel.at(a.id));
            } else {
                const double parent_label = cert.labels.at(a.id)[blocks[b].parent];
                const int ds = static_cast<int>(out.cert.bases.at(a.src)[b].cols());
                const int dd = static_cast<int>(out.cert.bases.at(a.dst)[b].cols());
                lab.push_back((ds == 0 || dd == 0) ? 0.0 : parent_label);
            }
        }
    }

    // agreement with the generic reflection up to a unitary basis change
    auto generic = reflect_minus(x, v, tol);
    const CMatrix g = w.adjoint() * generic.vertex_basis;
    if (generic.rep.dims.at(v) != k ||
        (generic.vertex_basis - w * g).norm() > tol.residual_tol ||
        (k > 0 && (g.adjoint() * g - cidentity(k)).norm() > tol.residual_tol))
        throw NumericalFailure("closed-form kernel space disagrees with generic reflection");
    pu_verify(out.refl.rep, out.cert, tol);
    return out;
}

} // namespace qrep
