#include "platoon/norms.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "platoon/errors.hpp"

namespace platoon {

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw InvalidParameter("log_grid requires 0 < lo < hi, points >= 2");
    std::vector<double> w(static_cast<size_t>(points));
    const double llo = std::log10(lo), lhi = std::log10(hi);
    for (int i = 0; i < points; ++i)
        w[static_cast<size_t>(i)] = std::pow(10.0, llo + (lhi - llo) * i / (points - 1));
    return w;
}

Eigen::MatrixXd lyap_ct(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
    const int n = static_cast<int>(A.rows());
    if (n == 0) return Eigen::MatrixXd(0, 0);
    Eigen::ComplexSchur<Eigen::MatrixXd> schur(A);
    const Eigen::MatrixXcd U = schur.matrixU();
    const Eigen::MatrixXcd T = schur.matrixT(); // upper triangular
    Eigen::MatrixXcd Qt = -(U.adjoint() * Q.cast<std::complex<double>>() * U);
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n, n);
    // Column sweep: (T^H + T(j,j) I) p_j = Qt_j - sum_{k<j} T(k,j) p_k.
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXcd rhs = Qt.col(j);
        for (int k = 0; k < j; ++k) rhs -= T(k, j) * P.col(k);
        Eigen::MatrixXcd L = T.adjoint();
        L.diagonal().array() += T(j, j);
        P.col(j) = L.triangularView<Eigen::Lower>().solve(rhs);
    }
    Eigen::MatrixXcd full = U * P * U.adjoint();
    Eigen::MatrixXd real_part = full.real();
    return 0.5 * (real_part + real_part.transpose());
}

namespace {

double h2_from_ss(const StateSpace& ss) {
    if (!ss.is_stable()) throw UnstableSystem("h2_norm requires a stable system");
    if (ss.D.cwiseAbs().maxCoeff() > 0.0) throw NotStrictlyProper("h2_norm requires a strictly proper system");
    if (ss.order() == 0) return 0.0;
    Eigen::MatrixXd Qo = lyap_ct(ss.A, ss.C.transpose() * ss.C);
    const double sq = (ss.B.transpose() * Qo * ss.B).trace();
    return std::sqrt(std::max(0.0, sq));
}

} // namespace

double h2_norm(const RationalFn& f) {
    if (f.is_zero()) return 0.0;
    if (!f.is_stable()) throw UnstableSystem("h2_norm requires a stable function: " + f.str());
    if (!f.is_strictly_proper()) throw NotStrictlyProper("h2_norm requires a strictly proper function: " + f.str());
    return h2_from_ss(to_state_space(f));
}

double h2_norm(const TfMatrix& m) {
    double sq = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if (m.at(i, j).is_zero()) continue;
            const double v = h2_norm(m.at(i, j));
            sq += v * v;
        }
    return std::sqrt(sq);
}

namespace {

double max_sv(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

// True when the Hamiltonian for level `gamma` has an eigenvalue on the
// imaginary axis, i.e. sup_w sv(G(jw)) crosses gamma.
bool hamiltonian_crosses(const StateSpace& ss, double gamma, double d_max) {
    if (gamma <= d_max * (1.0 + 1e-10)) return true;
    const int n = ss.order(), m = ss.inputs(), p = ss.outputs();
    Eigen::MatrixXd R = gamma * gamma * Eigen::MatrixXd::Identity(m, m) - ss.D.transpose() * ss.D;
    Eigen::MatrixXd Rinv = R.inverse();
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(p, p) + ss.D * Rinv * ss.D.transpose();
    Eigen::MatrixXd H(2 * n, 2 * n);
    Eigen::MatrixXd Acl = ss.A + ss.B * Rinv * ss.D.transpose() * ss.C;
    H.topLeftCorner(n, n) = Acl;
    H.topRightCorner(n, n) = ss.B * Rinv * ss.B.transpose();
    H.bottomLeftCorner(n, n) = -ss.C.transpose() * S * ss.C;
    H.bottomRightCorner(n, n) = -Acl.transpose();
    Eigen::EigenSolver<Eigen::MatrixXd> es(H, false);
    for (int i = 0; i < 2 * n; ++i) {
        const auto ev = es.eigenvalues()(i);
        if (std::abs(ev.real()) <= 1e-8 * (1.0 + std::abs(ev))) return true;
    }
    return false;
}

} // namespace

double hinf_norm(const StateSpace& ss, const HinfOptions& opt) {
    if (!ss.is_stable()) throw UnstableSystem("hinf_norm requires a stable system");
    const double d_max = max_sv(ss.D.cast<std::complex<double>>());
    if (ss.order() == 0) return d_max;
    double lo = d_max;
    for (double w : log_grid(opt.grid_lo, opt.grid_hi, opt.grid_points)) lo = std::max(lo, max_sv(ss.at_omega(w)));
    lo = std::max(lo, max_sv(ss.at_omega(0.0)));
    double hi = std::max(2.0 * lo, lo + 1.0);
    int guard = 0;
    while (hamiltonian_crosses(ss, hi, d_max)) {
        hi *= 2.0;
        if (++guard > 60) throw Error("hinf_norm bracket expansion failed");
    }
    while (hi - lo > opt.tol) {
        const double mid = 0.5 * (lo + hi);
        if (hamiltonian_crosses(ss, mid, d_max)) lo = mid;
        else hi = mid;
    }
    return hi;
}

double hinf_norm(const RationalFn& f, const HinfOptions& opt) {
    if (f.is_zero()) return 0.0;
    if (!f.is_stable()) throw UnstableSystem("hinf_norm requires a stable function: " + f.str());
    if (!f.is_proper()) throw ImproperSystem("hinf_norm requires a proper function: " + f.str());
    return hinf_norm(to_state_space(f), opt);
}

double hinf_norm(const TfMatrix& m, const HinfOptions& opt) {
    if (!m.all_stable()) throw UnstableSystem("hinf_norm requires a stable matrix");
    if (!m.all_proper()) throw ImproperSystem("hinf_norm requires a proper matrix");
    return hinf_norm(to_state_space(m), opt);
}

double grid_sup_sv(const TfMatrix& m, const std::vector<double>& omegas) {
    double v = 0.0;
    for (double w : omegas) v = std::max(v, max_sv(m.at_omega(w)));
    return v;
}

} // namespace platoon
