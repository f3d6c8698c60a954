#include "doctest.h"

#include "platoon/errors.hpp"
#include "platoon/pade.hpp"

#include <cmath>
#include <complex>

using namespace platoon;

namespace {

std::complex<double> exact_delay(double theta, double omega) {
    return std::exp(std::complex<double>(0.0, -omega * theta));
}

} // namespace

TEST_CASE("first order approximant matches the closed form") {
    // order 1: (1 - theta s / 2) / (1 + theta s / 2)
    const double theta = 0.03;
    const RationalFn p = pade_approx(theta, 1);
    const RationalFn ref(Polynomial{1.0, -0.015}, Polynomial{1.0, 0.015});
    for (double w : {0.1, 1.0, 10.0, 100.0}) {
        const std::complex<double> s(0.0, w);
        CHECK(std::abs(p(s) - ref(s)) < 1e-12);
    }
    CHECK(p.num_degree() == 1);
    CHECK(p.den_degree() == 1);
}

TEST_CASE("all-pass on the imaginary axis") {
    for (int order = 1; order <= 5; ++order) {
        for (double theta : {0.01, 0.03, 0.1, 1.0}) {
            const RationalFn p = pade_approx(theta, order);
            for (double w : {1e-3, 1e-1, 1.0, 1e1, 1e3}) {
                CAPTURE(order);
                CAPTURE(theta);
                CAPTURE(w);
                CHECK(std::abs(std::abs(p.at_omega(w)) - 1.0) < 1e-10);
            }
        }
    }
}

TEST_CASE("stable and biproper for every order") {
    for (int order = 1; order <= 5; ++order) {
        const RationalFn p = pade_approx(0.13, order);
        CHECK(p.is_stable());
        CHECK(p.is_proper());
        CHECK(!p.is_strictly_proper());
        CHECK(p.num_degree() == order);
        CHECK(p.den_degree() == order);
        CHECK(std::abs(p.dc() - 1.0) < 1e-12);
    }
}

TEST_CASE("phase tracks the exact delay at low frequency") {
    // An order-r approximant is accurate to O((omega theta)^{2r+1}).
    const double theta = 0.1;
    for (int order = 1; order <= 4; ++order) {
        const RationalFn p = pade_approx(theta, order);
        for (double w : {0.1, 0.5, 1.0}) {
            const double err = std::abs(p.at_omega(w) - exact_delay(theta, w));
            // Theoretical order bound with a rounding floor: at order 4 and
            // w theta = 0.01 the bound drops below double resolution.
            const double budget =
                std::max(2.0 * std::pow(w * theta, 2 * order + 1), 1e-14);
            CAPTURE(order);
            CAPTURE(w);
            CHECK(err <= budget);
        }
    }
}

TEST_CASE("order three is accurate through the design band") {
    // theta = 0.03 with order 3 stays within 1e-6 of the exact delay
    // for omega <= 10, which is what the delay-compensated designs rely on.
    const RationalFn p = pade_approx(0.03, 3);
    for (double w : {0.01, 0.1, 1.0, 5.0, 10.0}) {
        CHECK(std::abs(p.at_omega(w) - exact_delay(0.03, w)) < 1e-6);
    }
}

TEST_CASE("zero delay collapses to unity") {
    const RationalFn p = pade_approx(0.0, 3);
    CHECK(p.num_degree() == 0);
    CHECK(p.den_degree() == 0);
    CHECK(std::abs(p(std::complex<double>(0.3, 2.0)) - 1.0) < 1e-15);
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(pade_approx(-0.01, 3), NegativeDelay);
    CHECK_THROWS_AS(pade_approx(0.1, 0), InvalidParameter);
    CHECK_THROWS_AS(pade_approx(0.1, -2), InvalidParameter);
}

TEST_CASE("powers compose like repeated delays") {
    // pade(theta)^k is the natural rational stand-in for e^{-k theta s}.
    const RationalFn p = pade_approx(0.03, 3);
    const RationalFn p2 = p.pow(2);
    for (double w : {0.1, 1.0, 5.0}) {
        CHECK(std::abs(p2.at_omega(w) - p.at_omega(w) * p.at_omega(w)) < 1e-12);
        CHECK(std::abs(std::abs(p2.at_omega(w)) - 1.0) < 1e-10);
    }
}
