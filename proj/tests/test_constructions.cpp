#include <doctest.h>

#include <qrep/constructions.hpp>
#include <qrep/decompose.hpp>

using namespace qrep;

namespace {

// source in the middle of a three-vertex path, one block-diagonal scalar
// structure per vertex
HilbertRep middle_source_rep(const std::vector<CMatrix>& mats) {
    HilbertRep x;
    x.quiver.vertices = {"1", "2", "3"};
    x.quiver.arrows = {{"e1", "2", "1"}, {"e2", "2", "3"}};
    const int d = static_cast<int>(mats[0].rows());
    x.dims = {{"1", d}, {"2", d}, {"3", d}};
    x.mats["e1"] = mats[0];
    x.mats["e2"] = mats[1];
    x.validate();
    return x;
}

PUDiagonalCert scalar_cert(const HilbertRep& x, const std::vector<std::vector<double>>& labels) {
    // one one-dimensional block per coordinate at every vertex
    PUDiagonalCert c;
    const int d = x.dim("2");
    for (const auto& v : x.quiver.vertices)
        for (int i = 0; i < d; ++i) {
            CMatrix e = CMatrix::Zero(d, 1);
            e(i, 0) = 1.0;
            c.bases[v].push_back(e);
        }
    c.labels["e1"] = labels[0];
    c.labels["e2"] = labels[1];
    return c;
}

} // namespace

TEST_CASE("truncated shift") {
    CMatrix s = truncated_shift(3);
    CMatrix expected = CMatrix::Zero(3, 3);
    expected(1, 0) = expected(2, 1) = 1.0;
    CHECK((s - expected).norm() == 0.0);
    CHECK((s * s * s).norm() == 0.0);
    CHECK_THROWS_AS(truncated_shift(0), BadParameter);
}

TEST_CASE("example kind names round trip and parameters are checked") {
    CHECK(example_kind_from_string("e8_tilde") == ExampleKind::E8Tilde);
    CHECK_THROWS_AS(example_kind_from_string("nope"), BadParameter);
    CHECK_THROWS_AS(build_example(ExampleKind::A0Loop, 0), BadParameter);
    CHECK_THROWS_AS(build_example(ExampleKind::AnTilde, 2, {}, 0), BadParameter);
    CHECK_THROWS_AS(build_example(ExampleKind::DnTilde, 2, {}, 4), BadParameter);
}

TEST_CASE("every model representation validates and is indecomposable") {
    struct Probe {
        ExampleKind kind;
        int N;
        int n;
    };
    const Probe probes[] = {
        {ExampleKind::A0Loop, 3, 0},      {ExampleKind::AnTilde, 2, 2},
        {ExampleKind::D4FourSpace, 2, 0}, {ExampleKind::DnTilde, 2, 5},
        {ExampleKind::E6Tilde, 2, 0},     {ExampleKind::E6TildeAlt, 2, 0},
        {ExampleKind::E7Tilde, 2, 0},     {ExampleKind::E8Tilde, 1, 0},
    };
    for (const auto& p : probes) {
        CAPTURE(static_cast<int>(p.kind));
        HilbertRep x = build_example(p.kind, p.N, Complex(0, 0), p.n);
        x.validate();
        auto verdict = is_indecomposable(x);
        CHECK(verdict.indecomposable);
        CHECK(verdict.end_dim - verdict.radical_dim == 1);
    }
}

TEST_CASE("the four subspace model has the commutant of its operator as End") {
    // End of the configuration (axes, graph of a, diagonal) is isomorphic to
    // the commutant of a; for the nilpotent truncated shift that is N
    for (int N : {2, 3}) {
        HilbertRep x = build_d4_fourspace(N, truncated_shift(N));
        auto verdict = is_indecomposable(x);
        CHECK(verdict.indecomposable);
        CHECK(verdict.end_dim == N);
        CHECK(verdict.radical_dim == N - 1);
    }
    CHECK_THROWS_AS(build_d4_fourspace(2, truncated_shift(3)), BadParameter);
}

TEST_CASE("cycle model composes to a Jordan block around the loop") {
    HilbertRep x = build_example(ExampleKind::AnTilde, 3, Complex(0, 0), 2);
    CHECK(x.quiver.vertices.size() == 3);
    auto cls = underlying_classify(x.quiver);
    CHECK(cls.kind == GraphClass::ExtendedDynkin);
    CHECK(cls.type == "A~2");
    CHECK(end_dim(x) == 3);  // same commutant as one Jordan block of size 3
}

TEST_CASE("the two E6-type configurations are not isomorphic") {
    HilbertRep a = build_example(ExampleKind::E6Tilde, 1);
    HilbertRep b = build_example(ExampleKind::E6TildeAlt, 1);
    REQUIRE(a.quiver == b.quiver);
    for (const auto& v : a.quiver.vertices) CHECK(a.dim(v) == b.dim(v));
    CHECK(!find_isomorphism(a, b).has_value());
    CHECK(find_isomorphism(a, a).has_value());
}

TEST_CASE("certificate verification catches violations") {
    CMatrix one = CMatrix::Constant(1, 1, 1.0);
    HilbertRep x = middle_source_rep({one, 2.0 * one});
    PUDiagonalCert c = scalar_cert(x, {{1.0}, {2.0}});
    CHECK_NOTHROW(pu_verify(x, c));
    PUDiagonalCert bad = c;
    bad.labels["e2"] = {3.0};
    CHECK_THROWS_AS(pu_verify(x, bad), CertInvalid);
    PUDiagonalCert missing = c;
    missing.labels.erase("e1");
    CHECK_THROWS_AS(pu_verify(x, missing), CertInvalid);
}

TEST_CASE("closed-form reflection: two positive blocks combine") {
    CMatrix one = CMatrix::Constant(1, 1, 1.0);
    HilbertRep x = middle_source_rep({one, one});
    PUDiagonalCert c = scalar_cert(x, {{1.0}, {1.0}});
    auto r = pu_reflect_minus(x, c, "2");
    CHECK(r.refl.rep.dim("2") == 1);
    // kernel direction of (1 1)^*-stacking: (1, -1)/sqrt(2) up to the
    // composite unitary, with both new labels 1/sqrt(2)
    const double isq = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(std::abs(r.refl.vertex_basis(0, 0)) - isq) < 1e-12);
    CHECK(std::abs(r.refl.vertex_basis(0, 0) + r.refl.vertex_basis(1, 0)) < 1e-12);
    CHECK(r.cert.labels.at("e1")[0] == doctest::Approx(isq));
    CHECK(r.cert.labels.at("e2")[0] == doctest::Approx(isq));
}

TEST_CASE("closed-form reflection: asymmetric positive labels") {
    CMatrix one = CMatrix::Constant(1, 1, 1.0);
    HilbertRep x = middle_source_rep({3.0 * one, 4.0 * one});
    PUDiagonalCert c = scalar_cert(x, {{3.0}, {4.0}});
    auto r = pu_reflect_minus(x, c, "2");
    CHECK(r.refl.rep.dim("2") == 1);
    CHECK(r.cert.labels.at("e1")[0] == doctest::Approx(4.0 / 5.0));
    CHECK(r.cert.labels.at("e2")[0] == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("closed-form reflection: positive against zero projects") {
    CMatrix one = CMatrix::Constant(1, 1, 1.0), zero = CMatrix::Zero(1, 1);
    HilbertRep x = middle_source_rep({2.0 * one, zero});
    PUDiagonalCert c = scalar_cert(x, {{2.0}, {0.0}});
    auto r = pu_reflect_minus(x, c, "2");
    CHECK(r.refl.rep.dim("2") == 1);
    CHECK(r.cert.labels.at("e1")[0] == 0.0);
    CHECK(r.cert.labels.at("e2")[0] == doctest::Approx(1.0));
}

TEST_CASE("closed-form reflection: a doubly zero block splits in two") {
    CMatrix zero = CMatrix::Zero(1, 1);
    HilbertRep x = middle_source_rep({zero, zero});
    PUDiagonalCert c = scalar_cert(x, {{0.0}, {0.0}});
    CHECK(c.block_count() == 1);
    auto r = pu_reflect_minus(x, c, "2");
    CHECK(r.refl.rep.dim("2") == 2);
    CHECK(r.cert.block_count() == 2);
    // each side keeps exactly one of the two new blocks
    CHECK(r.cert.bases.at("1")[0].cols() + r.cert.bases.at("1")[1].cols() == 1);
    CHECK(r.cert.bases.at("3")[0].cols() + r.cert.bases.at("3")[1].cols() == 1);
}

TEST_CASE("closed-form reflection at a path end") {
    HilbertRep x;
    x.quiver.vertices = {"1", "2"};
    x.quiver.arrows = {{"e", "1", "2"}};
    x.dims = {{"1", 1}, {"2", 1}};
    x.mats["e"] = CMatrix::Constant(1, 1, 2.0);
    PUDiagonalCert c;
    c.bases["1"] = {CMatrix::Identity(1, 1)};
    c.bases["2"] = {CMatrix::Identity(1, 1)};
    c.labels["e"] = {2.0};
    auto pos = pu_reflect_minus(x, c, "1");
    CHECK(pos.refl.rep.dim("1") == 0);  // positive block dies at the end

    x.mats["e"] = CMatrix::Zero(1, 1);
    c.labels["e"] = {0.0};
    auto zer = pu_reflect_minus(x, c, "1");
    CHECK(zer.refl.rep.dim("1") == 1);  // zero block survives with a unitary
    CHECK(zer.cert.labels.at("e")[0] == doctest::Approx(1.0));
}

TEST_CASE("closed-form reflection on a two-block structure") {
    CMatrix f1 = CMatrix::Zero(2, 2), f2 = CMatrix::Zero(2, 2);
    f1(0, 0) = 1.0;              // block 1: label 1, block 2: label 0
    f2(0, 0) = 0.5;
    f2(1, 1) = 2.0;              // block 1: label 0.5, block 2: label 2
    HilbertRep x = middle_source_rep({f1, f2});
    PUDiagonalCert c = scalar_cert(x, {{1.0, 0.0}, {0.5, 2.0}});
    CHECK_NOTHROW(pu_verify(x, c));
    auto r = pu_reflect_minus(x, c, "2");
    CHECK(r.refl.rep.dim("2") == 2);
    CHECK(r.cert.block_count() == 2);
    const double root = std::sqrt(1.0 + 0.25);
    CHECK(r.cert.labels.at("e1")[0] == doctest::Approx(0.5 / root));
    CHECK(r.cert.labels.at("e2")[0] == doctest::Approx(1.0 / root));
    CHECK(r.cert.labels.at("e1")[1] == doctest::Approx(1.0));
    CHECK(r.cert.labels.at("e2")[1] == 0.0);
}
