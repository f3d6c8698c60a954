#include "doctest.h"

#include <cmath>
#include <random>

#include "platoon/errors.hpp"
#include "platoon/norms.hpp"

using namespace platoon;
using doctest::Approx;

namespace {
RationalFn first_order(double a) { return RationalFn(Polynomial{1.0}, Polynomial{a, 1.0}); }
} // namespace

TEST_CASE("log_grid endpoints and spacing") {
    auto g = log_grid(1e-2, 1e2, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == Approx(1e-2));
    CHECK(g.back() == Approx(1e2));
    CHECK(g[2] == Approx(1.0));
    CHECK_THROWS_AS(log_grid(1.0, 10.0, 1), InvalidParameter);
    CHECK_THROWS_AS(log_grid(-1.0, 10.0, 5), InvalidParameter);
}

TEST_CASE("h2 norm closed forms") {
    // ||1/(s+a)||_2^2 = 1/(2a).
    for (double a : {0.25, 1.0, 3.0, 17.0}) {
        double got = h2_norm(first_order(a));
        CHECK(got == Approx(std::sqrt(1.0 / (2.0 * a))).epsilon(1e-8));
    }
    CHECK(h2_norm(first_order(1.0)) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));

    // ||1/(s+1)^2||_2^2 = 1/4 (impulse response t e^{-t}).
    RationalFn f(1.0, {}, {Factor{Polynomial{1.0, 1.0}, 2}});
    CHECK(h2_norm(f) == Approx(0.5).epsilon(1e-8));

    CHECK(h2_norm(RationalFn::zero()) == Approx(0.0));
}

TEST_CASE("h2 norm of a matrix sums squared entries") {
    TfMatrix m = TfMatrix::diagonal({first_order(1.0), first_order(1.0)});
    CHECK(h2_norm(m) == Approx(1.0).epsilon(1e-8)); // sqrt(1/2 + 1/2)
}

TEST_CASE("h2 norm rejects unstable and biproper inputs") {
    CHECK_THROWS_AS(h2_norm(RationalFn(Polynomial{1.0}, Polynomial{-1.0, 1.0})), UnstableSystem);
    CHECK_THROWS_AS(h2_norm(RationalFn(Polynomial{1.0}, Polynomial{0.0, 1.0})), UnstableSystem);
    CHECK_THROWS_AS(h2_norm(RationalFn(Polynomial{1.0, 1.0}, Polynomial{2.0, 1.0})),
                    NotStrictlyProper);
}

TEST_CASE("hinf norm closed forms") {
    // The bisection terminates at its 1e-6 relative tolerance.
    CHECK(hinf_norm(first_order(1.0)) == Approx(1.0).epsilon(2e-6));
    // Resonant second order system, zeta = 0.1: peak = 1/(2 zeta sqrt(1-zeta^2)).
    RationalFn res(Polynomial{1.0}, Polynomial{1.0, 0.2, 1.0});
    CHECK(hinf_norm(res) == Approx(5.02518907629606).epsilon(2e-6));
    CHECK(hinf_norm(RationalFn(3.0)) == Approx(3.0));
    // The peak of (s+2)/(s+1) sits at infinite frequency.
    RationalFn hp(Polynomial{2.0, 1.0}, Polynomial{1.0, 1.0});
    CHECK(hinf_norm(hp) == Approx(2.0).epsilon(1e-6));
}

TEST_CASE("hinf norm rejects unstable and improper inputs") {
    CHECK_THROWS_AS(hinf_norm(RationalFn(Polynomial{1.0}, Polynomial{-2.0, 1.0})), UnstableSystem);
    CHECK_THROWS_AS(hinf_norm(RationalFn(Polynomial{0.0, 0.0, 1.0}, Polynomial{1.0, 1.0})),
                    ImproperSystem);
}

TEST_CASE("bisection agrees with a dense frequency sweep on random systems") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> mod(0.2, 20.0), damp(0.5, 1.5), pick(0.0, 1.0);
    auto grid = log_grid(1e-3, 1e3, 800);
    for (int trial = 0; trial < 20; ++trial) {
        // Random stable function: two real poles or a damped pair, one zero.
        Polynomial den;
        if (pick(rng) < 0.5) {
            den = Polynomial{mod(rng), 1.0} * Polynomial{mod(rng), 1.0};
        } else {
            double wn = mod(rng), z = damp(rng) * 0.5;
            den = Polynomial{wn * wn, 2.0 * z * wn, 1.0};
        }
        Polynomial num = Polynomial{mod(rng), pick(rng)};
        RationalFn f(num, den);
        TfMatrix m(1, 1);
        m.set(0, 0, f);
        double exact = hinf_norm(f);
        double swept = grid_sup_sv(m, grid);
        CHECK(swept <= exact * (1.0 + 1e-6));
        CHECK(swept >= exact * (1.0 - 2e-3)); // sweep resolution bound
    }
}

TEST_CASE("matrix hinf norm is the peak largest singular value") {
    TfMatrix m(2, 1);
    m.set(0, 0, first_order(1.0));
    m.set(1, 0, first_order(1.0));
    // Stacked identical channels: sqrt(2) times the scalar peak (at w = 0).
    CHECK(hinf_norm(m) == Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("lyapunov solver residual") {
    Eigen::MatrixXd A(2, 2);
    A << -1.0, 0.5, 0.0, -3.0;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd P = lyap_ct(A, Q);
    Eigen::MatrixXd R = A.transpose() * P + P * A + Q;
    CHECK(R.cwiseAbs().maxCoeff() < 1e-12);
    CHECK((P - P.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}
