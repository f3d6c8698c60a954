#include "platoon/state_space.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "platoon/errors.hpp"

namespace platoon {

bool StateSpace::is_stable(double margin) const {
    if (order() == 0) return true;
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    for (int i = 0; i < order(); ++i)
        if (es.eigenvalues()[i].real() > -margin) return false;
    return true;
}

Eigen::MatrixXcd StateSpace::operator()(std::complex<double> s) const {
    const int n = order();
    if (n == 0) return D.cast<std::complex<double>>();
    Eigen::MatrixXcd sIA = s * Eigen::MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>();
    Eigen::MatrixXcd x = sIA.partialPivLu().solve(B.cast<std::complex<double>>());
    return C.cast<std::complex<double>>() * x + D.cast<std::complex<double>>();
}

Eigen::MatrixXcd StateSpace::at_omega(double w) const { return (*this)(std::complex<double>(0.0, w)); }

StateSpace to_state_space(const RationalFn& f) {
    if (!f.is_proper()) throw ImproperSystem("to_state_space requires a proper function: " + f.str());
    StateSpace ss;
    if (f.is_zero() || f.den_degree() == 0) {
        ss.A.resize(0, 0);
        ss.B.resize(0, 1);
        ss.C.resize(1, 0);
        ss.D = Eigen::MatrixXd::Constant(1, 1, f.is_zero() ? 0.0 : f.dc());
        return ss;
    }
    const Polynomial den = f.den(); // monic by canonical form
    const Polynomial num = f.num();
    const int n = den.degree();
    // Frequency scaling s = c*z with c the geometric mean of the nonzero pole
    // magnitudes (read off the trailing coefficient, no root finding). Atom
    // products mix pole scales two decades apart at high multiplicity, and
    // the raw companion form of such a denominator is past what a balanced
    // eigensolver can represent; centering the roots at magnitude one keeps
    // the coefficient spread harmless. The realization is rescaled exactly.
    int lo = 0;
    while (lo < n && den.coeff(lo) == 0.0) ++lo;
    double c = lo < n ? std::pow(std::abs(den.coeff(lo)), 1.0 / (n - lo)) : 1.0;
    if (!(c > 1e-6)) c = 1e-6;
    if (!(c < 1e6)) c = 1e6;
    std::vector<double> dz(static_cast<size_t>(n) + 1), nz(static_cast<size_t>(n) + 1, 0.0);
    for (int k = 0; k <= n; ++k) dz[static_cast<size_t>(k)] = den.coeff(k) * std::pow(c, k - n);
    for (int k = 0; k <= num.degree(); ++k) nz[static_cast<size_t>(k)] = num.coeff(k) * std::pow(c, k - n);
    const Polynomial den_z(std::move(dz)), num_z(std::move(nz));
    auto [q, r] = divmod(num_z, den_z);
    ss.A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = c;
    for (int j = 0; j < n; ++j) ss.A(n - 1, j) = -c * den_z.coeff(j);
    ss.B = Eigen::MatrixXd::Zero(n, 1);
    ss.B(n - 1, 0) = 1.0;
    ss.C = Eigen::MatrixXd::Zero(1, n);
    for (int j = 0; j < n; ++j) ss.C(0, j) = c * r.coeff(j);
    ss.D = Eigen::MatrixXd::Constant(1, 1, q.is_zero() ? 0.0 : q.coeff(0));
    return ss;
}

StateSpace to_state_space(const TfMatrix& m) {
    const int p = m.rows(), q = m.cols();
    int total = 0;
    std::vector<StateSpace> blocks;
    blocks.reserve(static_cast<size_t>(p) * q);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) {
            blocks.push_back(to_state_space(m.at(i, j)));
            total += blocks.back().order();
        }
    StateSpace ss;
    ss.A = Eigen::MatrixXd::Zero(total, total);
    ss.B = Eigen::MatrixXd::Zero(total, q);
    ss.C = Eigen::MatrixXd::Zero(p, total);
    ss.D = Eigen::MatrixXd::Zero(p, q);
    int off = 0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) {
            const StateSpace& b = blocks[static_cast<size_t>(i) * q + j];
            const int n = b.order();
            if (n > 0) {
                ss.A.block(off, off, n, n) = b.A;
                ss.B.block(off, j, n, 1) = b.B;
                ss.C.block(i, off, 1, n) = b.C;
            }
            ss.D(i, j) += b.D(0, 0);
            off += n;
        }
    return ss;
}

namespace {

// Orthonormal basis of the smallest A-invariant subspace containing range(B),
// grown block-Arnoldi style with rank decisions at `tol` relative.
Eigen::MatrixXd controllable_basis(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double tol) {
    const int n = static_cast<int>(A.rows());
    Eigen::MatrixXd X(n, 0);
    Eigen::MatrixXd fresh = B;
    const double scale = std::max({1.0, A.norm(), B.norm()});
    for (int pass = 0; pass <= n && fresh.cols() > 0; ++pass) {
        // Orthogonalize `fresh` against X (twice, for stability).
        for (int rep = 0; rep < 2; ++rep)
            if (X.cols() > 0) fresh -= X * (X.transpose() * fresh);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(fresh);
        qr.setThreshold(tol);
        const int r = std::min<int>(static_cast<int>(qr.rank()),
                                    static_cast<int>(std::min(fresh.rows(), fresh.cols())));
        // Discard directions whose magnitude is below the absolute floor.
        Eigen::MatrixXd Qf = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
        Eigen::MatrixXd Rf = qr.matrixR().topLeftCorner(r, fresh.cols()).triangularView<Eigen::Upper>();
        int keep = 0;
        for (int i = 0; i < r; ++i)
            if (std::abs(Rf(i, i)) > tol * scale) ++keep;
        if (keep == 0) break;
        Qf = Qf.leftCols(keep).eval();
        Eigen::MatrixXd Xn(n, X.cols() + keep);
        Xn << X, Qf;
        X = Xn;
        if (X.cols() >= n) break;
        fresh = A * Qf;
    }
    return X;
}

StateSpace reduce_controllable(const StateSpace& ss, double tol) {
    if (ss.order() == 0) return ss;
    Eigen::MatrixXd X = controllable_basis(ss.A, ss.B, tol);
    StateSpace out;
    out.A = X.transpose() * ss.A * X;
    out.B = X.transpose() * ss.B;
    out.C = ss.C * X;
    out.D = ss.D;
    return out;
}

StateSpace transpose_system(const StateSpace& ss) {
    StateSpace t;
    t.A = ss.A.transpose();
    t.B = ss.C.transpose();
    t.C = ss.B.transpose();
    t.D = ss.D.transpose();
    return t;
}

} // namespace

StateSpace minreal(const StateSpace& ss, double tol) {
    StateSpace c = reduce_controllable(ss, tol);
    StateSpace o = transpose_system(reduce_controllable(transpose_system(c), tol));
    return o;
}

DiscreteSS zoh_discretize(const StateSpace& ss, double dt) {
    if (dt <= 0.0) throw InvalidParameter("zoh_discretize requires dt > 0");
    const int n = ss.order(), m = ss.inputs();
    DiscreteSS d;
    d.C = ss.C;
    d.D = ss.D;
    if (n == 0) {
        d.Ad.resize(0, 0);
        d.Bd.resize(0, m);
        return d;
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + m, n + m);
    M.topLeftCorner(n, n) = ss.A * dt;
    M.topRightCorner(n, m) = ss.B * dt;
    Eigen::MatrixXd E = M.exp();
    d.Ad = E.topLeftCorner(n, n);
    d.Bd = E.topRightCorner(n, m);
    return d;
}

} // namespace platoon
