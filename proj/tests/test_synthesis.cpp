#include "doctest.h"

#include "platoon/coprime.hpp"
#include "platoon/errors.hpp"
#include "platoon/model.hpp"
#include "platoon/norms.hpp"
#include "platoon/synthesis.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace platoon;

namespace {

PlatoonConfig hetero_config(int n, double h) {
    PlatoonConfig cfg;
    cfg.n = n;
    cfg.headway = h;
    cfg.leader = {5.0, 0.1, 2.0};
    const std::vector<VehicleParams> pool = {
        {8.0, 0.1, 1.0}, {4.0, 0.2, 2.0}, {1.0, 0.05, 3.0},
        {3.0, 0.1, 4.0}, {2.0, 0.1, 5.0}, {7.0, 0.3, 6.0},
    };
    cfg.vehicles.assign(pool.begin(), pool.begin() + n);
    return cfg;
}

PlatoonConfig homogeneous_config(int n) {
    PlatoonConfig cfg;
    cfg.n = n;
    cfg.headway = 0.0;
    cfg.leader = {2.0, 0.1, 1.5};
    cfg.vehicles.assign(static_cast<size_t>(n), {2.0, 0.1, 1.5});
    return cfg;
}

RationalFn random_stable_q(std::mt19937& rng) {
    std::uniform_real_distribution<double> pole(0.5, 6.0);
    std::uniform_real_distribution<double> num(-2.0, 2.0);
    const double p = pole(rng);
    return RationalFn(Polynomial{num(rng), num(rng)}, Polynomial{p, 1.0});
}

DiagonalYoula random_diag(int n, std::mt19937& rng) {
    DiagonalYoula q;
    for (int k = 0; k < n; ++k) q.q.push_back(random_stable_q(rng));
    return q;
}

} // namespace

TEST_CASE("youla parameter validation") {
    DiagonalYoula q;
    q.q.assign(3, RationalFn::one());
    CHECK_NOTHROW(q.validate(3));
    CHECK_THROWS_AS(q.validate(4), InvalidParameter);

    q.q[1] = RationalFn(Polynomial{1.0}, Polynomial{-1.0, 1.0}); // pole at +1
    CHECK_THROWS_AS(q.validate(3), UnstableParameter);

    q.q[1] = RationalFn(Polynomial{0.0, 1.0}, Polynomial{1.0}); // improper
    CHECK_THROWS_AS(q.validate(3), ImproperSystem);
}

TEST_CASE("diagonal parameters keep the sensitivity diagonal") {
    // Definition check, done numerically: (I + G K)^{-1} has off-diagonal
    // entries below 1e-7 on the grid for every diagonal stable Q.
    std::mt19937 rng(41);
    for (int n : {2, 3}) {
        const PlatoonConfig cfg = hetero_config(n, 0.5);
        const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
        for (int trial = 0; trial < 4; ++trial) {
            CAPTURE(n);
            CAPTURE(trial);
            const DiagonalYoula q = random_diag(n, rng);
            const LeaderInfoController c = build_controller(dcf, q);
            const TfMatrix k = controller_tfm(c);
            CHECK(sensitivity_offdiag_max(dcf, k) < 1e-7);
        }
    }
}

TEST_CASE("closed-loop maps agree with the per-entry closed forms") {
    // The diagonal overload cross-checks every entry internally and throws
    // on any mismatch beyond 1e-8, so a clean return is the assertion.
    std::mt19937 rng(17);
    const PlatoonConfig cfg = hetero_config(4, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const DiagonalYoula q = random_diag(4, rng);

    ClosedLoopMaps maps;
    CHECK_NOTHROW(maps = closed_loop(dcf, q));

    CHECK(maps.t_zw0.rows() == 4);
    CHECK(maps.t_zw0.cols() == 1);
    CHECK(maps.t_zw.rows() == 4);
    CHECK(maps.t_zw.cols() == 4);

    // Leader disturbance only reaches the first spacing error.
    for (int k = 1; k < 4; ++k) CHECK(maps.t_zw0.at(k, 0).is_zero());
    CHECK(!maps.t_zw0.at(0, 0).is_zero());
    // But every control channel sees it.
    for (int k = 0; k < 4; ++k) CHECK(!maps.t_uw0.at(k, 0).is_zero());

    // A disturbance at vehicle j only marks errors j and j+1.
    for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) {
            const bool hit = (k == j) || (k == j + 1);
            CAPTURE(j);
            CAPTURE(k);
            CHECK(maps.t_zw.at(k, j).is_zero() == !hit);
        }
    }
    // Controls: nothing upstream of the disturbance reacts.
    for (int j = 1; j < 4; ++j)
        for (int k = 0; k < j; ++k) CHECK(maps.t_uw.at(k, j).is_zero());

    // All maps stable and proper.
    CHECK(maps.t_zw0.all_stable());
    CHECK(maps.t_zw.all_stable());
    CHECK(maps.t_uw0.all_stable());
    CHECK(maps.t_uw.all_stable());
}

TEST_CASE("matrix-parameter overload matches the diagonal one") {
    std::mt19937 rng(29);
    const PlatoonConfig cfg = hetero_config(3, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const DiagonalYoula q = random_diag(3, rng);
    const TfMatrix qm = structured_matrix(StructuredKind::diagonal, q.q);

    const ClosedLoopMaps a = closed_loop(dcf, q);
    const ClosedLoopMaps b = closed_loop(dcf, qm);
    for (double w : {0.01, 0.4, 8.0}) {
        CHECK((a.t_zw.at_omega(w) - b.t_zw.at_omega(w)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((a.t_uw0.at_omega(w) - b.t_uw0.at_omega(w)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("controller matrix closed form and recursion agree") {
    std::mt19937 rng(53);
    const PlatoonConfig cfg = hetero_config(4, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const LeaderInfoController c = build_controller(dcf, random_diag(4, rng));

    const TfMatrix k1 = controller_tfm(c);
    const TfMatrix k2 = controller_tfm_recursion(c);
    CHECK(k1.matches(Structure::lower_triangular));
    for (double w : {0.05, 1.0, 20.0}) {
        CHECK((k1.at_omega(w) - k2.at_omega(w)).cwiseAbs().maxCoeff() <
              1e-8 * (1.0 + k1.at_omega(w).cwiseAbs().maxCoeff()));
    }

    // Entry (3,1): two feedforward hops applied to vehicle 1's realized
    // local block H^{-1}K_1, i.e. H^{-2} phi_3^{-1} phi_1 (H^{-1}K_1)
    // (0-based at(2,0)).
    const RationalFn h = headway_filter(cfg.headway);
    const RationalFn want =
        c.phi[3].inverse() * c.phi[1] * c.local_gain[0] * (h * h).inverse();
    for (double w : {0.1, 2.0}) {
        CHECK(std::abs(k1.at(2, 0).at_omega(w) - want.at_omega(w)) <
              1e-8 * (1.0 + std::abs(want.at_omega(w))));
    }

    // Realized blocks are proper even though K_k itself is not at h > 0.
    for (const RationalFn& g : c.local_gain) CHECK(g.is_proper());
    for (const RationalFn& g : c.ff_gain) CHECK(g.is_proper());
    CHECK(static_cast<int>(c.feedforward.size()) == 3);
}

TEST_CASE("built controllers live in the broadcast subspace") {
    std::mt19937 rng(61);
    const PlatoonConfig cfg = hetero_config(3, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const LeaderInfoController c = build_controller(dcf, random_diag(3, rng));
    const TfMatrix k = controller_tfm(c);

    CHECK(qi_subspace_check(cfg, k));
    CHECK(kgk_in_subspace(cfg, base_plant(), k));

    // A generic dense matrix is not in the subspace.
    TfMatrix dense = k;
    dense.set(0, 2, RationalFn(Polynomial{1.0}, Polynomial{1.0, 1.0}));
    CHECK(!qi_subspace_check(cfg, dense));
}

TEST_CASE("local peak-gain design is certified and matches its grid estimate") {
    const PlatoonConfig cfg = hetero_config(3, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const QBasis basis;

    for (int j = 1; j <= 3; ++j) {
        CAPTURE(j);
        const LocalDesign d = local_hinf_design(dcf, j, basis);
        CHECK(!d.basis_limited);
        CHECK(d.q.is_stable());
        CHECK(d.q.is_proper());
        CHECK(d.cost > 0.0);
        // Exact norm of the assembled channel vs the optimizer's grid value.
        CHECK(std::abs(d.cost - d.grid_estimate) < 2e-3 * d.cost);
    }
}

TEST_CASE("joint two-parameter optimization does not beat the diagonal cost") {
    const PlatoonConfig cfg = hetero_config(3, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const QBasis basis;

    for (int j = 1; j <= 3; ++j) {
        CAPTURE(j);
        const LocalDesign d = local_optimal_qjj(dcf, j, DesignNorm::hinf, basis);
        CHECK(d.diagonal_cost > 0.0);
        CHECK(d.two_parameter_cost > 0.0);
        // The extra parameter never helps by more than numerical slack; at
        // j = n it cannot help at all (there is no j+1 entry to borrow).
        CHECK(d.two_parameter_cost <= d.diagonal_cost * (1.0 + 1e-6));
        // Within one fixed basis the joint problem reaches directions the
        // diagonal one cannot (the collapse substitution q - q'/(hs+1) leaves
        // the coefficient span), so a few percent of residual gap remains at
        // degree 8.  The exact collapse is checked below by matching spans.
        CHECK(d.diagonal_cost <= d.two_parameter_cost * 1.15);
        if (j == 3)
            CHECK(std::abs(d.two_parameter_cost - d.diagonal_cost) <=
                  1e-9 * d.diagonal_cost);
    }
}

TEST_CASE("collapse substitution is cost-free when the basis absorbs it") {
    // With the basis pole at the headway zero, (hs+1)/(lambda s+1)^i shifts
    // atoms down one slot, so {(hs+1)q : q in span_{d+1}} equals
    // {(hs+1)q - q' : q, q' in span_d} as sets.  The diagonal optimum one
    // degree up must then match the joint two-parameter optimum exactly,
    // which pins the off-diagonal slot coefficient in the joint problem.
    const PlatoonConfig cfg = hetero_config(3, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));

    QBasis joint_basis;
    joint_basis.degree = 8;
    joint_basis.lambda = cfg.headway;
    QBasis diag_basis;
    diag_basis.degree = 9;
    diag_basis.lambda = cfg.headway;

    for (int j = 1; j <= 2; ++j) {
        CAPTURE(j);
        const LocalDesign joint = local_optimal_qjj(dcf, j, DesignNorm::hinf, joint_basis);
        const LocalDesign diag = local_optimal_qjj(dcf, j, DesignNorm::hinf, diag_basis);
        CHECK(!joint.basis_limited);
        CHECK(!diag.basis_limited);
        CHECK(std::abs(diag.diagonal_cost - joint.two_parameter_cost) <=
              1e-6 * joint.two_parameter_cost);
    }
}

TEST_CASE("platoon-wide quadratic design separates per channel") {
    const PlatoonConfig cfg = hetero_config(3, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const QBasis basis;

    const auto [q, cost] = h2_design(dcf, basis);
    CHECK_NOTHROW(q.validate(3));
    CHECK(cost > 0.0);

    // Serial and parallel paths agree exactly in structure and tightly in value.
    DesignOptions par;
    par.parallel = true;
    const auto [qp, costp] = h2_design(dcf, basis, par);
    CHECK(std::abs(cost - costp) < 1e-10 * cost);
    for (int k = 0; k < 3; ++k) CHECK(near_equal(q.q[k], qp.q[k], 1e-8));

    // The reported cost is the exact norm of the assembled error map.
    const ClosedLoopMaps maps = closed_loop(dcf, q);
    double sq = 0.0;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            if (!maps.t_zw.at(k, j).is_zero()) {
                const double e = h2_norm(maps.t_zw.at(k, j));
                sq += e * e;
            }
    CHECK(std::abs(std::sqrt(sq) - cost) < 1e-6 * cost);
}

TEST_CASE("homogeneous zero-headway optimum and its decomposition") {
    for (int n : {2, 3}) {
        CAPTURE(n);
        const PlatoonConfig cfg = homogeneous_config(n);
        const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
        const QBasis basis;

        const HomogeneousH2 hom = homogeneous_h2_optimal(dcf, basis);
        CHECK(!hom.basis_limited);
        CHECK(hom.per_channel > 0.0);
        CHECK(std::abs(hom.bound - (2 * n - 1) * hom.per_channel * hom.per_channel) <
              1e-12 * hom.bound);
        // Assembled platoon cost realizes the decomposition bound.
        CHECK(std::abs(hom.assembled * hom.assembled - hom.bound) <
              1e-6 * std::max(1.0, hom.assembled * hom.assembled));

        // The unconstrained matrix optimum cannot do better, and for this
        // plant class it does no better at all.
        const auto [qfull, full_cost] = full_matrix_h2_design(dcf, basis);
        (void)qfull;
        CHECK(full_cost <= hom.assembled * (1.0 + 1e-6));
        CHECK(hom.assembled <= full_cost * (1.0 + 1e-2));
    }
}

TEST_CASE("homogeneous optimum rejects unsuitable platoons") {
    const PlatoonConfig het = hetero_config(3, 0.0);
    const PlatoonDcf dhet = platoon_dcf(het, scalar_dcf(base_plant(), 1.0));
    CHECK_THROWS_AS(homogeneous_h2_optimal(dhet, QBasis{}), RequiresHomogeneous);

    PlatoonConfig cfg = homogeneous_config(2);
    cfg.headway = 0.5;
    const PlatoonDcf dh = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    CHECK_THROWS_AS(homogeneous_h2_optimal(dh, QBasis{}), RequiresZeroHeadway);
}

TEST_CASE("propagation bounds hold for a designed platoon") {
    const PlatoonConfig cfg = hetero_config(4, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const auto [q, cost] = h2_design(dcf, QBasis{});
    const ClosedLoopMaps maps = closed_loop(dcf, q);

    const std::vector<BoundRow> rows = string_stability_bounds(dcf, maps);
    // Pairs (j,k), j in 0..n-1, k in j+1..n: n(n+1)/2 of them.
    CHECK(static_cast<int>(rows.size()) == 10);
    for (const BoundRow& r : rows) {
        CAPTURE(r.j);
        CAPTURE(r.k);
        CHECK(r.k > r.j);
        CHECK(r.actual >= 0.0);
        CHECK(r.actual <= r.bound + 1e-6);
    }
}

TEST_CASE("leader effort design touches only the first parameter") {
    const PlatoonConfig cfg = hetero_config(3, 0.5);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(base_plant(), 1.0));
    const LocalDesign d = leader_effort_h2(dcf, QBasis{});
    CHECK(!d.basis_limited);
    CHECK(d.q.is_stable());
    CHECK(d.cost > 0.0);
    CHECK(std::abs(d.cost - d.grid_estimate) < 2e-3 * d.cost);
}

TEST_CASE("factorization metadata reconstructs the plant") {
    const PlatoonConfig cfg = hetero_config(3, 0.5);
    const RationalFn core = base_plant_with_delay(0.13, 3);
    const PlatoonDcf dcf = platoon_dcf(cfg, scalar_dcf(core, 1.0), 0.13, 3);

    const TfMatrix g = plant_of(dcf);
    const TfMatrix g_ref = build_plant(cfg, core);
    for (double w : {0.1, 1.0, 10.0}) {
        CHECK((g.at_omega(w) - g_ref.at_omega(w)).cwiseAbs().maxCoeff() < 1e-9);
    }

    const TfMatrix v = leader_column_of(dcf);
    CHECK(v.rows() == 3);
    CHECK(v.cols() == 1);
    const RationalFn g0 = build_vehicle_tf(cfg.leader, core);
    for (double w : {0.1, 1.0}) {
        CHECK(std::abs(v.at(0, 0).at_omega(w) - g0.at_omega(w)) < 1e-9);
        CHECK(std::abs(v.at(1, 0).at_omega(w)) < 1e-12);
        CHECK(std::abs(v.at(2, 0).at_omega(w)) < 1e-12);
    }
}
