#include "platoon/coprime.hpp"

#include <Eigen/Dense>

#include "platoon/errors.hpp"
#include "platoon/norms.hpp"

namespace platoon {

namespace {

struct DiophantineSolution {
    std::vector<double> y, x;
    double row_residual = 1e300; // equilibrated row-wise relative residual
};

// Solve Y_p den + X_p num = (s+a)^(2p-1-ds) * carrier for deg(Y_p), deg(X_p)
// <= p-1, where `carrier` (degree ds) is the product of the plant's stable
// denominator atoms. The 2p x 2p Sylvester system is nonsingular iff
// gcd(den, num) = 1. Carrying the stable atoms in the target keeps the
// solution at the plant's own coefficient scale; an all-(s+a) target would
// force the pair to bridge the scale gap with huge coefficients, and the
// identity would then drown in cancellation no matter how it is verified.
DiophantineSolution solve_diophantine(const Polynomial& den, const Polynomial& num, double a,
                                      const Polynomial& carrier) {
    const int p = den.degree();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * p, 2 * p);
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k <= den.degree(); ++k) A(j + k, j) += den.coeff(k);
        for (int k = 0; k <= num.degree(); ++k) A(j + k, p + j) += num.coeff(k);
    }
    // Target coefficients convolved in extended precision from exact
    // binomials; a Hurwitz carrier has one-signed coefficients, so there is
    // no cancellation. Polynomial arithmetic is avoided on purpose: a target
    // perturbed even at roundoff level changes the equation being solved.
    using MatLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using VecLd = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const int ds = carrier.degree();
    const int e = 2 * p - 1 - ds;
    VecLd rhs_ld = VecLd::Zero(2 * p);
    long double binom = 1.0L;
    for (int k = 0; k <= e; ++k) {
        const long double bk = binom * std::pow(static_cast<long double>(a), e - k);
        for (int j = 0; j <= ds; ++j) rhs_ld(k + j) += bk * static_cast<long double>(carrier.coeff(j));
        binom = binom * (e - k) / (k + 1);
    }
    const Eigen::VectorXd rhs = rhs_ld.cast<double>();
    // Equilibrate before factoring: plants with an absorbed delay mix frequency
    // scales, and raw pivot magnitudes would misreport the rank.
    Eigen::VectorXd cscale = A.cwiseAbs().colwise().maxCoeff().transpose();
    for (int j = 0; j < 2 * p; ++j) cscale(j) = cscale(j) > 0.0 ? 1.0 / cscale(j) : 1.0;
    Eigen::MatrixXd As = A * cscale.asDiagonal();
    Eigen::VectorXd rscale = As.cwiseAbs().rowwise().maxCoeff();
    for (int i = 0; i < 2 * p; ++i) rscale(i) = rscale(i) > 0.0 ? 1.0 / rscale(i) : 1.0;
    As = rscale.asDiagonal() * As;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(As);
    Eigen::VectorXd sol = cscale.asDiagonal() * lu.solve(rscale.asDiagonal() * rhs).eval();
    // Mixed-precision refinement: a double-precision residual saturates at
    // eps times the row scale, which can sit well above what the
    // verification grid tolerates.
    const MatLd A_ld = A.cast<long double>();
    VecLd resid_ld(2 * p);
    for (int pass = 0; pass < 3; ++pass) {
        resid_ld = rhs_ld - A_ld * sol.cast<long double>();
        sol += cscale.asDiagonal() * lu.solve(rscale.asDiagonal() * resid_ld.cast<double>()).eval();
    }
    resid_ld = rhs_ld - A_ld * sol.cast<long double>();
    DiophantineSolution out;
    // Row-equilibrated residual is the authority on solvability: a shared root
    // makes the target unreachable in every row scale, while an ill-conditioned
    // but regular system refines to ~1e-14. A plain max-norm test would let a
    // low-order row fail invisibly next to the large high-order coefficients.
    const Eigen::VectorXd scaled_resid = rscale.asDiagonal() * resid_ld.cast<double>();
    const Eigen::VectorXd scaled_rhs = rscale.asDiagonal() * rhs;
    out.row_residual = scaled_resid.cwiseAbs().maxCoeff() / std::max(1.0, scaled_rhs.cwiseAbs().maxCoeff());
    out.y.assign(sol.data(), sol.data() + p);
    out.x.assign(sol.data() + p, sol.data() + 2 * p);
    return out;
}

bool atom_stable(const Polynomial& atom) {
    for (const std::complex<double>& r : atom.roots())
        if (r.real() >= -kStabilityMargin) return false;
    return true;
}

} // namespace

ScalarDcf scalar_dcf(const RationalFn& g_wp, double alpha) {
    if (!(alpha > 0.0)) throw UnstableParameter("factorization pole -alpha must be stable (alpha > 0)");
    if (g_wp.is_zero()) return {RationalFn::one(), RationalFn::zero(), RationalFn::zero(), RationalFn::one(), alpha};
    if (!g_wp.is_strictly_proper()) throw NotStrictlyProper("scalar_dcf requires a strictly proper plant: " + g_wp.str());
    const Polynomial den = g_wp.den(); // monic, degree p >= 1
    const Polynomial num = g_wp.num();
    const int p = den.degree();

    // Stable denominator atoms ride along in the factor denominators; only
    // the unstable part of the plant needs replacing by (s+a) powers.
    std::vector<Factor> stable_atoms, unstable_atoms;
    Polynomial carrier = Polynomial::constant(1.0);
    for (const Factor& f : g_wp.den_factors()) {
        if (atom_stable(f.p)) {
            stable_atoms.push_back(f);
            for (int k = 0; k < f.exp; ++k) carrier *= f.p;
        } else {
            unstable_atoms.push_back(f);
        }
    }
    const int ds = carrier.degree();

    DiophantineSolution sol = solve_diophantine(den, num, alpha, carrier);
    if (sol.row_residual >= 1e-9)
        throw DegenerateCancellation("scalar_dcf: numerator and denominator share a root (residual " +
                                     std::to_string(sol.row_residual) + ")");

    // Denominators are handed over as exponentiated atoms, not expanded
    // polynomials: downstream sums locate common denominators by atom
    // identity, and an expanded power would never merge with a different
    // power of the same root.
    const Polynomial sa({alpha, 1.0});
    auto over = [&sa](const Polynomial& numer, int k) {
        std::vector<Factor> nf, df;
        if (numer.degree() >= 1) nf.push_back({numer, 1});
        if (k >= 1) df.push_back({sa, k});
        const double g = numer.degree() >= 1 ? 1.0 : numer.coeff(0);
        return RationalFn(g, std::move(nf), std::move(df));
    };

    ScalarDcf out;
    out.alpha = alpha;
    std::vector<Factor> mden, nden;
    if (p - ds >= 1) {
        mden.push_back({sa, p - ds});
        nden.push_back({sa, p - ds});
    }
    for (const Factor& f : stable_atoms) nden.push_back(f);
    out.M = RationalFn(1.0, unstable_atoms, std::move(mden));
    out.N = RationalFn(g_wp.gain(), g_wp.num_factors(), std::move(nden));
    out.Y = over(Polynomial(sol.y), p - 1);
    out.X = over(Polynomial(sol.x), p - 1);
    return out;
}

namespace {

std::vector<RationalFn> phis_of(const PlatoonConfig& cfg) {
    std::vector<RationalFn> phi;
    phi.reserve(static_cast<size_t>(cfg.n) + 1);
    for (int k = 0; k <= cfg.n; ++k) phi.push_back(build_phi(cfg.vehicle(k)));
    return phi;
}

TfMatrix followers_diag(const std::vector<RationalFn>& phi) {
    return TfMatrix::diagonal({phi.begin() + 1, phi.end()});
}

} // namespace

PlatoonDcf platoon_dcf(const PlatoonConfig& cfg, const ScalarDcf& scalar, double absorbed_delay_s,
                       int pade_order) {
    cfg.validate();
    PlatoonDcf d;
    d.n = cfg.n;
    d.headway = cfg.headway;
    d.alpha = scalar.alpha;
    d.absorbed_delay_s = absorbed_delay_s;
    d.pade_order = pade_order;
    d.core = scalar;
    d.g_core = scalar.N / scalar.M;
    d.phi = phis_of(cfg);

    const RationalFn H = headway_filter(cfg.headway);
    const RationalFn Hinv = H.inverse();
    const TfMatrix TPhi = build_T(cfg.n, cfg.headway) * followers_diag(d.phi);
    const TfMatrix TinvPhiinv = [&] {
        std::vector<RationalFn> inv;
        for (int k = 1; k <= cfg.n; ++k) inv.push_back(d.phi[static_cast<size_t>(k)].inverse());
        return TfMatrix::diagonal(inv) * build_T_inv(cfg.n, cfg.headway);
    }();
    const TfMatrix I = TfMatrix::identity(cfg.n);

    d.n_left = TPhi.scaled(scalar.N);
    d.m_left = I.scaled(scalar.M);
    d.y_left = TPhi.scaled(scalar.Y * Hinv);
    d.x_left = I.scaled(scalar.X * Hinv);
    d.x_right = TinvPhiinv.scaled(scalar.X);
    d.m_right = TinvPhiinv.scaled(scalar.M * H);
    d.y_right = I.scaled(scalar.Y);
    d.n_right = I.scaled(scalar.N * H);

    const double residual = verify_bezout(d);
    if (!(residual < 1e-8))
        throw BezoutViolation("platoon_dcf: Bezout residual " + std::to_string(residual) + " exceeds 1e-8");
    return d;
}

namespace {

using cld = std::complex<long double>;

cld eval_ld(const Polynomial& p, const cld& s) {
    cld acc = 0.0L;
    for (int i = p.degree(); i >= 0; --i) acc = acc * s + static_cast<long double>(p.coeff(i));
    return acc;
}

// Factored evaluation in extended precision. The identity holds exactly in
// the coefficients, but the factor products reach ~5e9 on the grid, so a
// double-precision product check bottoms out near 1e-6. 64-bit significands
// push the cancellation floor back below 1e-9.
cld eval_ld(const RationalFn& f, const cld& s) {
    cld v = static_cast<long double>(f.gain());
    for (const Factor& fac : f.num_factors()) {
        const cld b = eval_ld(fac.p, s);
        for (int e = 0; e < fac.exp; ++e) v *= b;
    }
    for (const Factor& fac : f.den_factors()) {
        const cld b = eval_ld(fac.p, s);
        for (int e = 0; e < fac.exp; ++e) v /= b;
    }
    return v;
}

double bezout_residual(const TfMatrix& left, const TfMatrix& right, int grid_points) {
    const int m = left.rows();
    double worst = 0.0;
    for (double w : log_grid(1e-3, 1e3, grid_points)) {
        const cld s(0.0L, static_cast<long double>(w));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                cld acc = 0.0L;
                for (int k = 0; k < m; ++k) {
                    if (left.at(i, k).is_zero() || right.at(k, j).is_zero()) continue;
                    acc += eval_ld(left.at(i, k), s) * eval_ld(right.at(k, j), s);
                }
                if (i == j) acc -= 1.0L;
                worst = std::max(worst, static_cast<double>(std::abs(acc)));
            }
        }
    }
    return worst;
}

} // namespace

double verify_bezout(const ScalarDcf& dcf, int grid_points) {
    TfMatrix left(2, 2), right(2, 2);
    left.set(0, 0, dcf.Y);
    left.set(0, 1, dcf.X);
    left.set(1, 0, -dcf.N);
    left.set(1, 1, dcf.M);
    right.set(0, 0, dcf.M);
    right.set(0, 1, -dcf.X);
    right.set(1, 0, dcf.N);
    right.set(1, 1, dcf.Y);
    return bezout_residual(left, right, grid_points);
}

double verify_bezout(const PlatoonDcf& dcf, int grid_points) {
    const TfMatrix left =
        TfMatrix::vstack(TfMatrix::hstack(dcf.y_left, dcf.x_left), TfMatrix::hstack(-dcf.n_left, dcf.m_left));
    const TfMatrix right =
        TfMatrix::vstack(TfMatrix::hstack(dcf.m_right, -dcf.x_right), TfMatrix::hstack(dcf.n_right, dcf.y_right));
    return bezout_residual(left, right, grid_points);
}

PlatoonDcf shift_dcf(const PlatoonDcf& dcf, const TfMatrix& q) {
    if (q.rows() != dcf.n || q.cols() != dcf.n) throw InvalidParameter("shift_dcf: parameter dimension mismatch");
    if (!q.all_stable()) throw UnstableParameter("shift_dcf: parameter must be stable");
    PlatoonDcf out = dcf;
    out.y_left = dcf.y_left - q * dcf.n_left;
    out.x_left = dcf.x_left + q * dcf.m_left;
    out.y_right = dcf.y_right - dcf.n_right * q;
    out.x_right = dcf.x_right + dcf.m_right * q;
    return out;
}

} // namespace platoon
