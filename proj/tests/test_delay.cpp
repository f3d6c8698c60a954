#include "doctest.h"

#include "platoon/coprime.hpp"
#include "platoon/delay.hpp"
#include "platoon/errors.hpp"
#include "platoon/model.hpp"
#include "platoon/pade.hpp"
#include "platoon/synthesis.hpp"

#include <cmath>
#include <vector>

using namespace platoon;

namespace {

PlatoonConfig small_config(int n, double h) {
    PlatoonConfig cfg;
    cfg.n = n;
    cfg.headway = h;
    cfg.leader = {5.0, 0.1, 2.0};
    const std::vector<VehicleParams> pool = {
        {8.0, 0.1, 1.0}, {4.0, 0.2, 2.0}, {1.0, 0.05, 3.0}, {3.0, 0.1, 4.0},
    };
    cfg.vehicles.assign(pool.begin(), pool.begin() + n);
    return cfg;
}

DiagonalYoula simple_q(int n) {
    DiagonalYoula q;
    for (int k = 0; k < n; ++k)
        q.q.push_back(RationalFn(Polynomial{0.4 + 0.1 * k},
                                 Polynomial{1.0, 0.5}));
    return q;
}

} // namespace

TEST_CASE("latency configuration validation") {
    DelayConfig d{0.03, 0.1, 3};
    CHECK_NOTHROW(d.validate());
    CHECK(d.total() == doctest::Approx(0.13));

    d.theta_s = -0.01;
    CHECK_THROWS_AS(d.validate(), NegativeDelay);

    d = {0.03, -0.1, 3};
    CHECK_THROWS_AS(d.validate(), NegativeDelay);

    d = {0.03, 0.1, 0};
    CHECK_THROWS_AS(d.validate(), InvalidParameter);
}

TEST_CASE("broadcast latency accumulates down the string") {
    const PlatoonConfig cfg = small_config(3, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const LeaderInfoController c = build_controller(dcf, simple_q(3));
    const TfMatrix k = controller_tfm(c);

    const DelayConfig d{0.03, 0.0, 3};
    const TfMatrix kd = delayed_controller_tfm(c, d);
    const RationalFn unit = pade_approx(d.theta_s, d.pade_order);

    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j <= i; ++j) {
            const RationalFn want = k.at(i, j) * unit.pow(i - j);
            for (double w : {0.1, 1.0, 10.0}) {
                CAPTURE(i);
                CAPTURE(j);
                CAPTURE(w);
                CHECK(std::abs(kd.at(i, j).at_omega(w) - want.at_omega(w)) <
                      1e-9 * (1.0 + std::abs(want.at_omega(w))));
            }
        }
    }
    // The diagonal is untouched: zero hops means zero accumulated delay.
    CHECK(near_equal(kd.at(1, 1), k.at(1, 1)));
}

TEST_CASE("zero latency leaves the controller alone") {
    const PlatoonConfig cfg = small_config(2, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const LeaderInfoController c = build_controller(dcf, simple_q(2));
    const TfMatrix k = controller_tfm(c);
    const TfMatrix kd = delayed_controller_tfm(c, DelayConfig{0.0, 0.0, 3});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j <= i; ++j) CHECK(near_equal(kd.at(i, j), k.at(i, j)));
}

TEST_CASE("uncompensated latency breaks distributed realizability") {
    const PlatoonConfig cfg = small_config(3, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const LeaderInfoController c = build_controller(dcf, simple_q(3));
    const TfMatrix k = controller_tfm(c);

    CHECK(membership_in_S(k, cfg));
    const TfMatrix kd = delayed_controller_tfm(c, DelayConfig{0.03, 0.0, 3});
    CHECK(!membership_in_S(kd, cfg));
}

TEST_CASE("off-diagonal leakage grows with the latency") {
    const PlatoonConfig cfg = small_config(3, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const LeaderInfoController c = build_controller(dcf, simple_q(3));

    double prev = 0.0;
    for (double theta : {0.005, 0.02, 0.08}) {
        const TfMatrix kd = delayed_controller_tfm(c, DelayConfig{theta, 0.0, 3});
        const double leak = sensitivity_offdiag_max(dcf, kd);
        CAPTURE(theta);
        CHECK(leak > prev);
        prev = leak;
    }
    CHECK(prev > 1e-3);
}

TEST_CASE("synchronized deployment restores the designed behavior") {
    const PlatoonConfig cfg = small_config(3, 0.5);
    const DelayConfig d{0.03, 0.1, 3};

    // Design against the delay-absorbed core.
    const RationalFn core = base_plant_with_delay(d.total(), d.pade_order);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(core, 1.0), d.total(), d.pade_order);
    const LeaderInfoController c = build_controller(dcf, simple_q(3));

    const LeaderInfoController cc = compensated_controller(c, d);
    CHECK(cc.measurement_delay_s == doctest::Approx(d.theta_s));
    CHECK(cc.broadcast_delay_s == doctest::Approx(d.theta_s));

    // The realization blocks are byte-for-byte the designed ones.
    for (int k = 0; k < 3; ++k)
        CHECK(near_equal(cc.local_gain[static_cast<size_t>(k)],
                         c.local_gain[static_cast<size_t>(k)]));
    for (int k = 0; k < 2; ++k)
        CHECK(near_equal(cc.ff_gain[static_cast<size_t>(k)],
                         c.ff_gain[static_cast<size_t>(k)]));

    // With synchronized measurements the aggregate controller is the designed
    // one, so it stays in the subspace and keeps the sensitivity diagonal.
    const TfMatrix k = controller_tfm(cc);
    CHECK(membership_in_S(k, cfg));
    CHECK(sensitivity_offdiag_max(dcf, k) < 1e-7);
}

TEST_CASE("compensation refuses a mismatched design plant") {
    const PlatoonConfig cfg = small_config(2, 0.5);
    const DelayConfig d{0.03, 0.1, 3};

    // Controller designed for the undelayed plant cannot be deployed as a
    // compensated controller for a delayed one.
    const PlatoonDcf plain = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const LeaderInfoController c0 = build_controller(plain, simple_q(2));
    CHECK_THROWS_AS(compensated_controller(c0, d), MismatchedPlantDelay);

    // Wrong absorbed amount.
    const RationalFn partial = base_plant_with_delay(d.theta_s, d.pade_order);
    const PlatoonDcf pd = platoon_dcf(cfg, scalar_dcf(partial, 1.0), d.theta_s, d.pade_order);
    const LeaderInfoController c1 = build_controller(pd, simple_q(2));
    CHECK_THROWS_AS(compensated_controller(c1, d), MismatchedPlantDelay);

    // Wrong approximation order.
    const RationalFn core2 = base_plant_with_delay(d.total(), 2);
    const PlatoonDcf pd2 = platoon_dcf(cfg, scalar_dcf(core2, 1.0), d.total(), 2);
    const LeaderInfoController c2 = build_controller(pd2, simple_q(2));
    CHECK_THROWS_AS(compensated_controller(c2, d), MismatchedPlantDelay);
}

TEST_CASE("subspace membership matches the synthesis-side check") {
    const PlatoonConfig cfg = small_config(3, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const LeaderInfoController c = build_controller(dcf, simple_q(3));
    const TfMatrix k = controller_tfm(c);
    CHECK(membership_in_S(k, cfg) == qi_subspace_check(cfg, k));
}
