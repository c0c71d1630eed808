#include <doctest.h>

#include <qrep/decompose.hpp>
#include <qrep/reflect.hpp>

using namespace qrep;

namespace {

HilbertRep a2_rep(int d1, int d2, const CMatrix& f) {
    HilbertRep x;
    x.quiver.vertices = {"1", "2"};
    x.quiver.arrows = {{"e", "1", "2"}};
    x.dims = {{"1", d1}, {"2", d2}};
    x.mats["e"] = f;
    x.validate();
    return x;
}

HilbertRep random_star_rep(std::uint64_t seed) {
    // three leaves mapping into a central sink
    Quiver q;
    q.vertices = {"l1", "l2", "l3", "r"};
    q.arrows = {{"a1", "l1", "r"}, {"a2", "l2", "r"}, {"a3", "l3", "r"}};
    q.normalize();
    HilbertRep x;
    x.quiver = q;
    x.dims = {{"l1", 1}, {"l2", 2}, {"l3", 2}, {"r", 3}};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    auto rnd = [&](int r, int c) {
        CMatrix m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
        return m;
    };
    x.mats = {{"a1", rnd(3, 1)}, {"a2", rnd(3, 2)}, {"a3", rnd(3, 2)}};
    x.validate();
    return x;
}

} // namespace

TEST_CASE("stacked matrices follow arrow-id order") {
    HilbertRep x = random_star_rep(11);
    CMatrix h = assemble_h(x, "r");
    CHECK(h.rows() == 3);
    CHECK(h.cols() == 5);
    CHECK((h.middleCols(0, 1) - x.mat("a1")).norm() == 0.0);
    CHECK((h.middleCols(1, 2) - x.mat("a2")).norm() == 0.0);
    CHECK((h.middleCols(3, 2) - x.mat("a3")).norm() == 0.0);
}

TEST_CASE("sink reflection on a surjective arrow") {
    CMatrix f(1, 2);
    f << 1.0, 0.0;
    HilbertRep x = a2_rep(2, 1, f);
    CHECK(fullness(x, "2"));
    auto r = reflect_plus(x, "2");
    CHECK(r.rep.dim("2") == 1);  // kernel of a surjective 1x2 map
    CHECK(r.rep.quiver.is_source("2"));
    // kernel of (1 0) is spanned by e_2
    CMatrix expected(2, 1);
    expected << 0.0, 1.0;
    CHECK((r.rep.mat("e") - expected).norm() < 1e-12);
    // output of a sink reflection is always co-full at the vertex
    CHECK(co_fullness(r.rep, "2"));
}

TEST_CASE("source reflection is the adjoint conjugate of the sink reflection") {
    CMatrix f(2, 3);
    f << 1, 0, 2, 0, 1, 1;
    HilbertRep x = a2_rep(3, 2, f);
    REQUIRE(x.quiver.is_source("1"));
    auto direct = reflect_minus(x, "1");
    auto sandwich = star(reflect_plus(star(x), "1").rep);
    CHECK(sandwich.quiver == direct.rep.quiver);
    for (const auto& a : direct.rep.quiver.arrows)
        CHECK((sandwich.mat(a.id) - direct.rep.mat(a.id)).norm() == 0.0);
    // output of a source reflection is always full at the vertex
    CHECK(fullness(direct.rep, "1"));
}

TEST_CASE("reflection preconditions") {
    HilbertRep x = a2_rep(1, 1, CMatrix::Identity(1, 1));
    CHECK_THROWS_AS(reflect_plus(x, "1"), NotASink);
    CHECK_THROWS_AS(reflect_minus(x, "2"), NotASource);
}

TEST_CASE("double reflection at a full sink is an isomorphism") {
    HilbertRep x = random_star_rep(23);
    REQUIRE(fullness(x, "r"));  // random 3x5 stack is surjective a.s.
    auto plus = reflect_plus(x, "r");
    auto minus = reflect_minus(plus.rep, "r");
    CHECK(minus.rep.quiver == x.quiver);
    for (const auto& v : x.quiver.vertices) CHECK(minus.rep.dim(v) == x.dim(v));
    auto iso = find_isomorphism(x, minus.rep);
    REQUIRE(iso.has_value());
    CHECK(intertwiner_residual(x, minus.rep, *iso) < 1e-8);
}

TEST_CASE("duality decomposition at a non-full sink") {
    CMatrix f(2, 1);
    f << 1.0, 1.0;
    HilbertRep x = a2_rep(1, 2, f);
    CHECK(!fullness(x, "2"));
    auto dual = duality_decompose_sink(x, "2");
    CHECK(dual.tilde_dim == 1);
    CHECK(dual.residual < 1e-8);
    CHECK(dual.tilde.dim("2") == 1);
    CHECK(dual.tilde.dim("1") == 0);
    CHECK(dual.reflected.dim("2") == 1);
    CHECK(dual.reflected.dim("1") == 1);
    // the recovered main summand is isomorphic to the full 1+1 piece
    CHECK(is_indecomposable(dual.reflected).indecomposable);
}

TEST_CASE("duality decomposition at a full sink has no complement") {
    HilbertRep x = random_star_rep(31);
    auto dual = duality_decompose_sink(x, "r");
    CHECK(dual.tilde_dim == 0);
    CHECK(dual.residual < 1e-8);
}

TEST_CASE("duality decomposition at a non-co-full source") {
    CMatrix f(1, 2);
    f << 1.0, 2.0;
    HilbertRep x = a2_rep(2, 1, f);
    REQUIRE(x.quiver.is_source("1"));
    CHECK(!co_fullness(x, "1"));
    auto dual = duality_decompose_source(x, "1");
    CHECK(dual.tilde_dim == 1);  // joint kernel of the outgoing matrices
    CHECK(dual.residual < 1e-8);
    CHECK(dual.tilde.dim("1") == 1);
    CHECK(dual.tilde.dim("2") == 0);
}

TEST_CASE("sink reflection acts functorially on intertwiners") {
    HilbertRep x = random_star_rep(41);
    HilbertRep y = direct_sum(x, x);
    auto basis = hom_basis(x, y);
    REQUIRE(!basis.empty());
    auto rx = reflect_plus(x, "r");
    auto ry = reflect_plus(y, "r");
    for (const auto& t : basis) {
        CHECK(intertwiner_residual(x, y, t) < 1e-9);
        VertexFamily rt = reflect_hom_plus(x, y, t, rx, ry);
        CHECK(intertwiner_residual(rx.rep, ry.rep, rt) < 1e-8);
    }
}

TEST_CASE("star is an involution") {
    HilbertRep x = random_star_rep(53);
    HilbertRep xx = star(star(x));
    CHECK(xx.quiver == x.quiver);
    for (const auto& a : x.quiver.arrows)
        CHECK((xx.mat(a.id) - x.mat(a.id)).norm() == 0.0);
}
