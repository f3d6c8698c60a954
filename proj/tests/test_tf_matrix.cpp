#include "doctest.h"

#include <complex>

#include "platoon/errors.hpp"
#include "platoon/tf_matrix.hpp"

using namespace platoon;
using doctest::Approx;

namespace {
RationalFn over1(double k) { return RationalFn(Polynomial{k}, Polynomial{1.0, 1.0}); }
} // namespace

TEST_CASE("identity and diagonal constructors") {
    TfMatrix I = TfMatrix::identity(3);
    CHECK(I.rows() == 3);
    CHECK(I.cols() == 3);
    CHECK(I.matches(Structure::diagonal));
    CHECK(I.at(0, 0).dc() == Approx(1.0));
    CHECK(I.at(0, 1).is_zero());

    TfMatrix D = TfMatrix::diagonal({over1(1.0), over1(2.0)});
    CHECK(D.structure() == Structure::diagonal);
    CHECK(D.at(1, 1).dc() == Approx(2.0));
}

TEST_CASE("structure tags re-infer on set") {
    TfMatrix m(3, 3);
    CHECK(m.matches(Structure::diagonal)); // all zero satisfies every pattern
    m.set(1, 0, over1(1.0));
    CHECK(m.matches(Structure::lower_bidiagonal));
    CHECK_FALSE(m.matches(Structure::diagonal));
    m.set(2, 0, over1(1.0));
    CHECK(m.matches(Structure::lower_triangular));
    CHECK_FALSE(m.matches(Structure::lower_bidiagonal));
    m.set(0, 2, over1(1.0));
    CHECK(m.structure() == Structure::full);
    m.set(0, 2, RationalFn::zero());
    m.set(2, 0, RationalFn::zero());
    CHECK(m.matches(Structure::lower_bidiagonal));
}

TEST_CASE("matrix algebra matches pointwise evaluation") {
    TfMatrix a(2, 2), b(2, 2);
    a.set(0, 0, over1(1.0));
    a.set(0, 1, over1(2.0));
    a.set(1, 1, over1(3.0));
    b.set(0, 0, RationalFn::s());
    b.set(1, 0, over1(-1.0));
    b.set(1, 1, over1(0.5));

    TfMatrix prod = a * b;
    TfMatrix sum = a + b;
    TfMatrix diff = a - b;
    for (double w : {0.1, 1.0, 10.0}) {
        auto A = a.at_omega(w), B = b.at_omega(w);
        CHECK((prod.at_omega(w) - A * B).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((sum.at_omega(w) - (A + B)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((diff.at_omega(w) - (A - B)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(((-a).at_omega(w) + A).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(a * TfMatrix(3, 2), InvalidParameter);
    CHECK_THROWS_AS(a + TfMatrix(3, 2), InvalidParameter);
}

TEST_CASE("scaled multiplies every entry") {
    TfMatrix m = TfMatrix::identity(2);
    TfMatrix s = m.scaled(over1(4.0));
    CHECK(s.at(0, 0).dc() == Approx(4.0));
    CHECK(s.at(0, 1).is_zero());
    CHECK(s.matches(Structure::diagonal));
}

TEST_CASE("stability and properness predicates") {
    TfMatrix m(2, 2);
    m.set(0, 0, over1(1.0));
    CHECK(m.all_stable());
    CHECK(m.all_proper());
    CHECK(m.all_strictly_proper());
    m.set(1, 1, RationalFn(Polynomial{1.0, 2.0}, Polynomial{1.0, 1.0}));
    CHECK_FALSE(m.all_strictly_proper());
    CHECK(m.all_proper());
    m.set(0, 1, RationalFn(Polynomial{1.0}, Polynomial{-1.0, 1.0}));
    CHECK_FALSE(m.all_stable());
}

TEST_CASE("hstack and vstack") {
    TfMatrix a = TfMatrix::identity(2);
    TfMatrix b(2, 1);
    b.set(0, 0, over1(5.0));
    TfMatrix h = TfMatrix::hstack(a, b);
    CHECK(h.rows() == 2);
    CHECK(h.cols() == 3);
    CHECK(h.at(0, 2).dc() == Approx(5.0));

    TfMatrix v = TfMatrix::vstack(a, a);
    CHECK(v.rows() == 4);
    CHECK(v.at(3, 1).dc() == Approx(1.0));
    CHECK_THROWS_AS(TfMatrix::vstack(a, TfMatrix(1, 3)), InvalidParameter);
    CHECK_THROWS_AS(TfMatrix::hstack(a, TfMatrix(3, 1)), InvalidParameter);
}

TEST_CASE("evaluation at a general complex point") {
    TfMatrix m(1, 1);
    m.set(0, 0, over1(2.0));
    std::complex<double> s(1.0, 1.0);
    CHECK(std::abs(m(s)(0, 0) - 2.0 / (s + 1.0)) < 1e-14);
}

TEST_CASE("out of range access throws") {
    TfMatrix m(2, 2);
    CHECK_THROWS_AS(m.at(2, 0), InvalidParameter);
    CHECK_THROWS_AS(m.set(0, -1, RationalFn::one()), InvalidParameter);
}
