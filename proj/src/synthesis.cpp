#include "platoon/synthesis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <limits>
#include <utility>

#include "platoon/errors.hpp"
#include "platoon/norms.hpp"

namespace platoon {

namespace {

using Cplx = std::complex<double>;

// Affine dependence of one response entry on the rational unknowns:
//     entry(s) = a(s) + sum_p coef_p(s) * q_{slot_p}(s).
struct AffineTerm {
    RationalFn a;
    std::vector<std::pair<int, RationalFn>> b;
};

// Everything tabulated on the frequency grid. Unknown vector x stacks the
// basis coefficients of each rational slot: x[p * A + m] multiplies atom m
// of slot p.
struct GridData {
    std::vector<double> w;
    std::vector<double> quad; // trapezoid weights of (1/pi) * d-omega
    std::vector<Eigen::VectorXcd> v;
    std::vector<Eigen::MatrixXcd> M;
    int unknowns = 0;
};

GridData tabulate(const std::vector<AffineTerm>& terms, int slots,
                  const std::vector<RationalFn>& atoms, const DesignOptions& opt) {
    GridData g;
    g.w = log_grid(opt.grid_lo, opt.grid_hi, opt.grid_points);
    const int T = static_cast<int>(g.w.size());
    const int R = static_cast<int>(terms.size());
    const int A = static_cast<int>(atoms.size());
    g.unknowns = slots * A;

    g.quad.resize(T);
    for (int t = 0; t < T; ++t) {
        double lo = (t == 0) ? 0.0 : 0.5 * (g.w[t] + g.w[t - 1]);
        double hi = (t == T - 1) ? g.w[t] : 0.5 * (g.w[t] + g.w[t + 1]);
        g.quad[t] = (hi - lo) / M_PI;
    }

    g.v.resize(T);
    g.M.resize(T);
    for (int t = 0; t < T; ++t) {
        g.v[t] = Eigen::VectorXcd::Zero(R);
        g.M[t] = Eigen::MatrixXcd::Zero(R, g.unknowns);
        std::vector<Cplx> av(A);
        for (int m = 0; m < A; ++m) av[m] = atoms[m].at_omega(g.w[t]);
        for (int r = 0; r < R; ++r) {
            g.v[t](r) = terms[r].a.at_omega(g.w[t]);
            for (const auto& [slot, coef] : terms[r].b) {
                Cplx c = coef.at_omega(g.w[t]);
                for (int m = 0; m < A; ++m) g.M[t](r, slot * A + m) += c * av[m];
            }
        }
    }
    return g;
}

// Weighted least squares over the grid; minimum-norm solution breaks ties
// among equal-cost coefficient vectors.
Eigen::VectorXd weighted_ls(const GridData& g, const std::vector<double>& weight) {
    const int T = static_cast<int>(g.w.size());
    const int R = static_cast<int>(g.v[0].size());
    Eigen::MatrixXd A(2 * R * T, g.unknowns);
    Eigen::VectorXd rhs(2 * R * T);
    for (int t = 0; t < T; ++t) {
        double sw = std::sqrt(std::max(weight[t], 0.0));
        for (int r = 0; r < R; ++r) {
            int row = 2 * (t * R + r);
            A.row(row) = sw * g.M[t].row(r).real();
            rhs(row) = -sw * g.v[t](r).real();
            A.row(row + 1) = sw * g.M[t].row(r).imag();
            rhs(row + 1) = -sw * g.v[t](r).imag();
        }
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    return svd.solve(rhs);
}

Eigen::VectorXd h2_ls(const GridData& g) { return weighted_ls(g, g.quad); }

double point_residual(const GridData& g, int t, const Eigen::VectorXd& x) {
    return (g.v[t] + g.M[t] * x).norm();
}

double max_residual(const GridData& g, const Eigen::VectorXd& x) {
    double mx = 0.0;
    for (int t = 0; t < static_cast<int>(g.w.size()); ++t)
        mx = std::max(mx, point_residual(g, t, x));
    return mx;
}

// Feasibility of max_t r_t(x) <= gamma via damped Newton on the convex
// squared-hinge merit sum_t max(0, r_t^2 - gamma^2)^2. Updates x in place.
bool hinge_feasible(const GridData& g, double gamma, Eigen::VectorXd& x) {
    const int T = static_cast<int>(g.w.size());
    const int U = g.unknowns;
    const double g2 = gamma * gamma;
    double mu = 1e-8;
    auto merit = [&](const Eigen::VectorXd& xx) {
        double f = 0.0;
        for (int t = 0; t < T; ++t) {
            double h = (g.v[t] + g.M[t] * xx).squaredNorm() - g2;
            if (h > 0.0) f += h * h;
        }
        return f;
    };
    double f = merit(x);
    for (int it = 0; it < 150 && f > 0.0; ++it) {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(U);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(U, U);
        for (int t = 0; t < T; ++t) {
            Eigen::VectorXcd res = g.v[t] + g.M[t] * x;
            double h = res.squaredNorm() - g2;
            if (h <= 0.0) continue;
            Eigen::VectorXd gt = 2.0 * (g.M[t].adjoint() * res).real();
            grad += 2.0 * h * gt;
            H += 2.0 * gt * gt.transpose();
            H += 4.0 * h * (g.M[t].adjoint() * g.M[t]).real();
        }
        bool stepped = false;
        for (int tries = 0; tries < 25; ++tries) {
            Eigen::MatrixXd Hd = H + mu * Eigen::MatrixXd::Identity(U, U);
            Eigen::VectorXd d = Hd.ldlt().solve(-grad);
            double ft = merit(x + d);
            if (ft < f) {
                x += d;
                f = ft;
                mu = std::max(mu / 3.0, 1e-12);
                stepped = true;
                break;
            }
            mu *= 10.0;
        }
        if (!stepped) break;
    }
    return max_residual(g, x) <= gamma * (1.0 + 1e-7);
}

struct MinimaxResult {
    Eigen::VectorXd x;
    double achieved = 0.0; // grid minimax value at x
};

// Lawson iteration (iteratively reweighted least squares for the Chebyshev
// problem) seeded uniformly, then bisection on the epigraph variable with
// the hinge feasibility solve. Deterministic.
MinimaxResult minimax_solve(const GridData& g) {
    const int T = static_cast<int>(g.w.size());
    std::vector<double> lambda(T, 1.0 / T);
    Eigen::VectorXd best;
    double best_val = std::numeric_limits<double>::infinity();
    double lb = 0.0;
    for (int it = 0; it < 60; ++it) {
        Eigen::VectorXd x = weighted_ls(g, lambda);
        double mx = 0.0, wsum = 0.0, norm = 0.0;
        std::vector<double> r(T);
        for (int t = 0; t < T; ++t) {
            r[t] = point_residual(g, t, x);
            mx = std::max(mx, r[t]);
            wsum += lambda[t] * r[t] * r[t];
        }
        lb = std::max(lb, std::sqrt(wsum)); // weak duality bound for any weights
        if (mx < best_val) {
            best_val = mx;
            best = x;
        }
        for (int t = 0; t < T; ++t) {
            lambda[t] *= r[t] + 1e-300;
            norm += lambda[t];
        }
        for (int t = 0; t < T; ++t) lambda[t] /= norm;
    }
    double lo = std::min(lb, best_val), hi = best_val;
    for (int it = 0; it < 80 && hi - lo > 1e-7 * std::max(1.0, hi); ++it) {
        double gamma = 0.5 * (lo + hi);
        Eigen::VectorXd x = best;
        if (hinge_feasible(g, gamma, x)) {
            double mx = max_residual(g, x);
            if (mx < hi) {
                hi = mx;
                best = x;
            } else {
                hi = gamma;
            }
        } else {
            lo = gamma;
        }
    }
    return {best, hi};
}

RationalFn assemble_slot(const Eigen::VectorXd& x, int slot, const std::vector<RationalFn>& atoms) {
    RationalFn q;
    const int A = static_cast<int>(atoms.size());
    for (int m = 0; m < A; ++m) {
        double c = x(slot * A + m);
        if (c != 0.0) q += RationalFn(c) * atoms[m];
    }
    return q;
}

bool coefficients_blown(const Eigen::VectorXd& x) {
    return x.size() > 0 && x.cwiseAbs().maxCoeff() > 1e6;
}

RationalFn substitute(const AffineTerm& term, const std::vector<RationalFn>& q) {
    RationalFn out = term.a;
    for (const auto& [slot, coef] : term.b) out += coef * q[static_cast<size_t>(slot)];
    return out;
}

TfMatrix column_of(const std::vector<RationalFn>& entries) {
    TfMatrix m(static_cast<int>(entries.size()), 1);
    for (int i = 0; i < static_cast<int>(entries.size()); ++i) m.set(i, 0, entries[i]);
    return m;
}

// Stacked [spacing error; control] response of vehicle j to its own
// disturbance, affine in the diagonal entry q_jj.
std::vector<AffineTerm> own_channel_stack(const PlatoonDcf& dcf, int j) {
    const RationalFn H = headway_filter(dcf.headway);
    const RationalFn &Y = dcf.core.Y, &X = dcf.core.X, &N = dcf.core.N, &M = dcf.core.M;
    const RationalFn& fj = dcf.phi[static_cast<size_t>(j)];
    AffineTerm z, u;
    z.a = -(Y * N * H * fj);
    z.b = {{0, H * N * N * H * fj}};
    u.a = -(X * N);
    u.b = {{0, -(H * M * N)}};
    return {z, u};
}

void require_vehicle_index(const PlatoonDcf& dcf, int j) {
    if (j < 1 || j > dcf.n) throw InvalidParameter("vehicle index out of range");
}

} // namespace

void DiagonalYoula::validate(int n) const {
    if (static_cast<int>(q.size()) != n)
        throw InvalidParameter("diagonal parameter needs one entry per follower");
    for (const auto& qi : q) {
        if (!qi.is_stable()) throw UnstableParameter("parameter entry has unstable pole");
        if (!qi.is_proper()) throw ImproperSystem("parameter entry must be proper");
    }
}

std::vector<RationalFn> QBasis::atoms() const {
    if (degree < 0) throw InvalidParameter("basis degree must be nonnegative");
    if (!(lambda > 0.0)) throw InvalidParameter("basis pole time constant must be positive");
    std::vector<RationalFn> out;
    out.reserve(static_cast<size_t>(degree) + 1);
    RationalFn pole(Polynomial({1.0}), Polynomial({1.0, lambda}));
    RationalFn cur = RationalFn::one();
    out.push_back(cur);
    for (int m = 1; m <= degree; ++m) {
        cur *= pole;
        out.push_back(cur);
    }
    return out;
}

LeaderInfoController build_controller(const PlatoonDcf& dcf, const DiagonalYoula& q) {
    q.validate(dcf.n);
    TfMatrix qm = TfMatrix::diagonal(q.q);

    LeaderInfoController c;
    c.n = dcf.n;
    c.headway = dcf.headway;
    c.alpha = dcf.alpha;
    c.phi = dcf.phi;
    c.youla = q;
    c.design_delay_s = dcf.absorbed_delay_s;
    c.design_pade_order = dcf.pade_order;

    c.yq = dcf.y_left - qm * dcf.n_left;
    c.xq = dcf.x_left + qm * dcf.m_left;
    if (!c.yq.matches(Structure::lower_bidiagonal))
        throw Error("shifted Y factor lost its lower-bidiagonal structure");
    if (!c.xq.matches(Structure::diagonal))
        throw Error("shifted X factor lost its diagonal structure");

    const RationalFn H = headway_filter(dcf.headway);
    const RationalFn Hi = H.inverse();
    c.local_k.reserve(static_cast<size_t>(dcf.n));
    c.local_gain.reserve(static_cast<size_t>(dcf.n));
    for (int k = 1; k <= dcf.n; ++k) {
        const RationalFn& qk = q.q[static_cast<size_t>(k - 1)];
        RationalFn den = dcf.core.Y - qk * H * dcf.core.N;
        if (den.is_zero()) throw SingularYFactor("local Y factor vanished");
        RationalFn num = dcf.core.X + qk * H * dcf.core.M;
        RationalFn kk = dcf.phi[static_cast<size_t>(k)].inverse() * den.inverse() * num;
        RationalFn gain = Hi * kk;
        if (!gain.is_proper())
            throw ImproperSystem("realized local gain is improper; parameter rejected");
        c.local_k.push_back(kk);
        c.local_gain.push_back(gain);
    }
    for (int k = 2; k <= dcf.n; ++k) {
        RationalFn ff =
            dcf.phi[static_cast<size_t>(k)].inverse() * dcf.phi[static_cast<size_t>(k - 1)];
        RationalFn gain = Hi * ff;
        if (!gain.is_proper()) throw ImproperSystem("realized feedforward gain is improper");
        c.feedforward.push_back(ff);
        c.ff_gain.push_back(gain);
    }
    return c;
}

TfMatrix controller_tfm(const LeaderInfoController& c) {
    if (c.n <= 0 || static_cast<int>(c.local_gain.size()) != c.n)
        throw SingularFactor("controller has no realized gains");
    const RationalFn Hi = headway_filter(c.headway).inverse();
    TfMatrix k(c.n, c.n);
    for (int i = 1; i <= c.n; ++i) {
        for (int j = 1; j <= i; ++j) {
            RationalFn entry = c.local_gain[static_cast<size_t>(j - 1)];
            if (i > j) {
                entry *= Hi.pow(i - j) * c.phi[static_cast<size_t>(i)].inverse() *
                         c.phi[static_cast<size_t>(j)];
            }
            k.set(i - 1, j - 1, entry);
        }
    }
    if (!k.matches(Structure::lower_triangular))
        throw SingularFactor("controller matrix lost lower-triangular structure");
    return k;
}

TfMatrix controller_tfm_recursion(const LeaderInfoController& c) {
    if (c.n <= 0 || static_cast<int>(c.local_gain.size()) != c.n)
        throw SingularFactor("controller has no realized gains");
    if (static_cast<int>(c.ff_gain.size()) != c.n - 1)
        throw SingularFactor("controller has no realized feedforward blocks");
    TfMatrix k(c.n, c.n);
    for (int i = 1; i <= c.n; ++i) {
        k.set(i - 1, i - 1, c.local_gain[static_cast<size_t>(i - 1)]);
        for (int j = 1; j < i; ++j)
            k.set(i - 1, j - 1, c.ff_gain[static_cast<size_t>(i - 2)] * k.at(i - 2, j - 1));
    }
    return k;
}

ClosedLoopMaps closed_loop(const PlatoonDcf& dcf, const TfMatrix& q) {
    if (q.rows() != dcf.n || q.cols() != dcf.n)
        throw InvalidParameter("parameter matrix has wrong dimensions");
    if (!q.all_proper()) throw ImproperSystem("parameter matrix must be proper");
    if (!q.all_stable()) throw UnstableParameter("parameter matrix must be stable");

    PlatoonDcf shifted = shift_dcf(dcf, q);
    TfMatrix lead(dcf.n, 1);
    lead.set(0, 0, dcf.core.N * dcf.phi[0]);

    ClosedLoopMaps maps;
    maps.t_zw0 = shifted.y_right * lead;
    maps.t_uw0 = shifted.x_right * lead;
    maps.t_zw = -(shifted.y_right * dcf.n_left);
    maps.t_uw = -(shifted.x_right * dcf.n_left);

    for (const TfMatrix* m : {&maps.t_zw0, &maps.t_uw0, &maps.t_zw, &maps.t_uw}) {
        if (!m->all_stable()) throw UnstableSystem("closed-loop map must be stable");
        if (!m->all_proper()) throw ImproperSystem("closed-loop map must be proper");
    }
    return maps;
}

ClosedLoopMaps closed_loop(const PlatoonDcf& dcf, const DiagonalYoula& q) {
    q.validate(dcf.n);
    ClosedLoopMaps maps = closed_loop(dcf, TfMatrix::diagonal(q.q));

    // Independent cross-check: every entry must match the per-index closed
    // form evaluated pointwise on the grid.
    const int n = dcf.n;
    const RationalFn H = headway_filter(dcf.headway);
    const auto grid = log_grid(1e-3, 1e3, 50);
    double worst = 0.0;
    for (double w : grid) {
        Cplx y = dcf.core.Y.at_omega(w), x = dcf.core.X.at_omega(w);
        Cplx nn = dcf.core.N.at_omega(w), mm = dcf.core.M.at_omega(w);
        Cplx h = H.at_omega(w);
        std::vector<Cplx> f(static_cast<size_t>(n) + 1), qv(static_cast<size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) f[static_cast<size_t>(k)] = dcf.phi[static_cast<size_t>(k)].at_omega(w);
        for (int k = 1; k <= n; ++k) qv[static_cast<size_t>(k)] = q.q[static_cast<size_t>(k - 1)].at_omega(w);

        Eigen::MatrixXcd z0 = maps.t_zw0.at_omega(w), u0 = maps.t_uw0.at_omega(w);
        Eigen::MatrixXcd zz = maps.t_zw.at_omega(w), uu = maps.t_uw.at_omega(w);
        auto track = [&worst](Cplx got, Cplx ref) {
            double err = std::abs(got - ref) / std::max(1.0, std::abs(ref));
            worst = std::max(worst, err);
        };
        for (int k = 1; k <= n; ++k) {
            Cplx ref0 = (k == 1) ? (y - h * nn * qv[1]) * nn * f[0] : Cplx(0.0);
            track(z0(k - 1, 0), ref0);
            Cplx refu0 = (x + h * mm * qv[1]) * nn * f[0] / (f[static_cast<size_t>(k)] * std::pow(h, k));
            track(u0(k - 1, 0), refu0);
            for (int j = 1; j <= n; ++j) {
                Cplx refz(0.0), refu(0.0);
                if (k == j) refz = -(y - h * nn * qv[static_cast<size_t>(j)]) * nn * h * f[static_cast<size_t>(j)];
                if (k == j + 1) refz = (y - h * nn * qv[static_cast<size_t>(k)]) * nn * f[static_cast<size_t>(j)];
                if (k == j) refu = -(x + h * mm * qv[static_cast<size_t>(j)]) * nn;
                if (k > j) {
                    refu = -mm * (qv[static_cast<size_t>(j)] - qv[static_cast<size_t>(j + 1)]) * nn *
                           f[static_cast<size_t>(j)] / f[static_cast<size_t>(k)] / std::pow(h, k - j - 1);
                }
                track(zz(k - 1, j - 1), refz);
                track(uu(k - 1, j - 1), refu);
            }
        }
    }
    // Structural-bug guard: a wrong sign or index in the closed forms shows up
    // as O(1) disagreement.  High-degree optimized parameters leave expansion
    // debris up to a few 1e-7 in the direct matrix path, so the gate sits at
    // 1e-6; tighter agreement claims live in the tests with modest parameters.
    if (worst > 1e-6) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", worst);
        throw Error(std::string("closed-loop map disagrees with per-index closed form by ") + buf);
    }
    return maps;
}

LocalDesign local_hinf_design(const PlatoonDcf& dcf, int j, const QBasis& basis,
                              const DesignOptions& opt) {
    require_vehicle_index(dcf, j);
    const auto atoms = basis.atoms();
    const auto terms = own_channel_stack(dcf, j);
    GridData g = tabulate(terms, 1, atoms, opt);
    MinimaxResult res = minimax_solve(g);

    LocalDesign out;
    out.q = assemble_slot(res.x, 0, atoms);
    out.grid_estimate = res.achieved;
    out.basis_limited = coefficients_blown(res.x);
    std::vector<RationalFn> qs = {out.q};
    TfMatrix stack = column_of({substitute(terms[0], qs), substitute(terms[1], qs)});
    out.cost = hinf_norm(stack);
    out.diagonal_cost = out.cost;
    return out;
}

LocalDesign local_optimal_qjj(const PlatoonDcf& dcf, int j, DesignNorm norm, const QBasis& basis,
                              const DesignOptions& opt) {
    require_vehicle_index(dcf, j);
    const auto atoms = basis.atoms();
    const RationalFn H = headway_filter(dcf.headway);
    const RationalFn &Y = dcf.core.Y, &N = dcf.core.N;
    const RationalFn& fj = dcf.phi[static_cast<size_t>(j)];

    AffineTerm diag;
    diag.a = -(Y * N * H * fj);
    diag.b = {{0, H * N * N * H * fj}};

    auto solve_one = [&](const std::vector<AffineTerm>& terms, int slots, Eigen::VectorXd& x) {
        GridData g = tabulate(terms, slots, atoms, opt);
        if (norm == DesignNorm::hinf) {
            MinimaxResult res = minimax_solve(g);
            x = res.x;
            return res.achieved;
        }
        x = h2_ls(g);
        return 0.0;
    };

    auto certified = [&](const AffineTerm& term, const std::vector<RationalFn>& qs) {
        RationalFn entry = substitute(term, qs);
        return norm == DesignNorm::hinf ? hinf_norm(entry) : h2_norm(entry);
    };

    LocalDesign out;
    Eigen::VectorXd xd;
    out.grid_estimate = solve_one({diag}, 1, xd);
    out.q = assemble_slot(xd, 0, atoms);
    out.basis_limited = coefficients_blown(xd);
    out.cost = certified(diag, {out.q});
    out.diagonal_cost = out.cost;
    if (norm == DesignNorm::h2) out.grid_estimate = out.cost;

    if (j < dcf.n) {
        // Second parameter: the superdiagonal entry enters the same channel
        // through the off-pattern product, weighted without the extra H.
        AffineTerm two = diag;
        two.b.push_back({1, -(H * N * N * fj)});
        Eigen::VectorXd xt;
        solve_one({two}, 2, xt);
        std::vector<RationalFn> qs = {assemble_slot(xt, 0, atoms), assemble_slot(xt, 1, atoms)};
        out.two_parameter_cost = certified(two, qs);
        out.basis_limited = out.basis_limited || coefficients_blown(xt);
    } else {
        out.two_parameter_cost = out.cost;
    }
    return out;
}

std::pair<DiagonalYoula, double> h2_design(const PlatoonDcf& dcf, const QBasis& basis,
                                           const DesignOptions& opt) {
    const auto atoms = basis.atoms();
    const RationalFn H = headway_filter(dcf.headway);
    const RationalFn &Y = dcf.core.Y, &N = dcf.core.N;

    DiagonalYoula youla;
    youla.q.resize(static_cast<size_t>(dcf.n));
    std::vector<std::exception_ptr> errors(static_cast<size_t>(dcf.n));

#if defined(PLATOON_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
#endif
    for (int k = 1; k <= dcf.n; ++k) {
        try {
            std::vector<AffineTerm> terms;
            AffineTerm own;
            own.a = Y * N * H * dcf.phi[static_cast<size_t>(k)];
            own.b = {{0, -(H * N * N * H * dcf.phi[static_cast<size_t>(k)])}};
            terms.push_back(own);
            if (k >= 2) {
                AffineTerm spill; // the same parameter leaks one column left
                spill.a = Y * N * dcf.phi[static_cast<size_t>(k - 1)];
                spill.b = {{0, -(H * N * N * dcf.phi[static_cast<size_t>(k - 1)])}};
                terms.push_back(spill);
            }
            GridData g = tabulate(terms, 1, atoms, opt);
            Eigen::VectorXd x = h2_ls(g);
            youla.q[static_cast<size_t>(k - 1)] = assemble_slot(x, 0, atoms);
        } catch (...) {
            errors[static_cast<size_t>(k - 1)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    ClosedLoopMaps maps = closed_loop(dcf, youla);
    return {youla, h2_norm(maps.t_zw)};
}

HomogeneousH2 homogeneous_h2_optimal(const PlatoonDcf& dcf, const QBasis& basis,
                                     const DesignOptions& opt) {
    if (std::abs(dcf.headway) > 1e-12)
        throw RequiresZeroHeadway("global optimum decomposition needs h = 0");
    for (int k = 2; k <= dcf.n; ++k) {
        if (!near_equal(dcf.phi[static_cast<size_t>(k)], dcf.phi[1]))
            throw RequiresHomogeneous("vehicle models must be identical");
    }
    const auto atoms = basis.atoms();
    const RationalFn &Y = dcf.core.Y, &N = dcf.core.N;
    const RationalFn& f = dcf.phi[1];

    AffineTerm chan;
    chan.a = Y * N * f;
    chan.b = {{0, -(N * N * f)}};
    GridData g = tabulate({chan}, 1, atoms, opt);
    Eigen::VectorXd x = h2_ls(g);

    HomogeneousH2 out;
    out.q0 = assemble_slot(x, 0, atoms);
    out.basis_limited = coefficients_blown(x);
    out.per_channel = h2_norm(substitute(chan, {out.q0}));
    out.bound = (2.0 * dcf.n - 1.0) * out.per_channel * out.per_channel;

    DiagonalYoula youla;
    youla.q.assign(static_cast<size_t>(dcf.n), out.q0);
    ClosedLoopMaps maps = closed_loop(dcf, youla);
    out.assembled = h2_norm(maps.t_zw);
    return out;
}

std::pair<TfMatrix, double> full_matrix_h2_design(const PlatoonDcf& dcf, const QBasis& basis,
                                                  const DesignOptions& opt) {
    const auto atoms = basis.atoms();
    const int n = dcf.n;
    const RationalFn H = headway_filter(dcf.headway);
    const RationalFn HN = H * dcf.core.N;
    auto slot = [n](int i, int l) { return (i - 1) * n + (l - 1); };

    // Error map entries are affine in the full parameter matrix: entry (i,j)
    // sees Q(i,j) through the diagonal of the lower factor and Q(i,j+1)
    // through its subdiagonal.
    std::vector<AffineTerm> terms;
    terms.reserve(static_cast<size_t>(n) * n);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            AffineTerm t;
            t.a = dcf.core.Y * dcf.n_left.at(i - 1, j - 1);
            t.b.push_back({slot(i, j), -(HN * dcf.n_left.at(j - 1, j - 1))});
            if (j < n) t.b.push_back({slot(i, j + 1), -(HN * dcf.n_left.at(j, j - 1))});
            terms.push_back(t);
        }
    }
    GridData g = tabulate(terms, n * n, atoms, opt);
    Eigen::VectorXd x = h2_ls(g);

    TfMatrix q(n, n);
    for (int i = 1; i <= n; ++i)
        for (int l = 1; l <= n; ++l) q.set(i - 1, l - 1, assemble_slot(x, slot(i, l), atoms));

    ClosedLoopMaps maps = closed_loop(dcf, q);
    return {q, h2_norm(maps.t_zw)};
}

std::vector<BoundRow> string_stability_bounds(const PlatoonDcf& dcf, const ClosedLoopMaps& maps) {
    const int n = dcf.n;
    const RationalFn Hi = headway_filter(dcf.headway).inverse();
    auto stack = [&](int k, int j) {
        TfMatrix m(2, 1);
        if (j == 0) {
            m.set(0, 0, maps.t_zw0.at(k - 1, 0));
            m.set(1, 0, maps.t_uw0.at(k - 1, 0));
        } else {
            m.set(0, 0, maps.t_zw.at(k - 1, j - 1));
            m.set(1, 0, maps.t_uw.at(k - 1, j - 1));
        }
        return m;
    };

    std::vector<double> own(static_cast<size_t>(n) + 1, 0.0);
    for (int k = 1; k <= n; ++k) own[static_cast<size_t>(k)] = hinf_norm(stack(k, k));
    const double hi_norm = hinf_norm(Hi);

    std::vector<BoundRow> rows;
    for (int k = 1; k <= n; ++k) {
        BoundRow r{0, k, hinf_norm(stack(k, 0)), 0.0};
        RationalFn w = dcf.phi[static_cast<size_t>(k)].inverse() * dcf.phi[0] * Hi.pow(k);
        r.bound = hinf_norm(w) * own[1];
        rows.push_back(r);
    }
    for (int j = 1; j < n; ++j) {
        RationalFn ratio = dcf.phi[static_cast<size_t>(j)] * dcf.phi[static_cast<size_t>(j + 1)].inverse();
        double ratio_norm = hinf_norm(ratio);
        {
            BoundRow r{j, j + 1, hinf_norm(stack(j + 1, j)), 0.0};
            r.bound = std::max(hi_norm, ratio_norm) * own[static_cast<size_t>(j)] +
                      ratio_norm * own[static_cast<size_t>(j + 1)];
            rows.push_back(r);
        }
        for (int k = j + 2; k <= n; ++k) {
            BoundRow r{j, k, hinf_norm(stack(k, j)), 0.0};
            RationalFn w = dcf.phi[static_cast<size_t>(j)] *
                           dcf.phi[static_cast<size_t>(k)].inverse() * Hi.pow(k - j - 1);
            r.bound = hinf_norm(w) *
                      (own[static_cast<size_t>(j)] + own[static_cast<size_t>(j + 1)]);
            rows.push_back(r);
        }
    }
    return rows;
}

bool qi_subspace_check(const PlatoonConfig& cfg, const TfMatrix& k, double tol, int grid_points) {
    cfg.validate();
    if (k.rows() != cfg.n || k.cols() != cfg.n)
        throw InvalidParameter("controller matrix has wrong dimensions");
    std::vector<RationalFn> phis;
    for (int i = 1; i <= cfg.n; ++i) phis.push_back(build_phi(cfg.vehicle(i)));
    TfMatrix probe = build_T(cfg.n, cfg.headway) * TfMatrix::diagonal(phis) * k;
    if (probe.matches(Structure::diagonal)) return true;
    for (double w : log_grid(1e-3, 1e3, grid_points)) {
        Eigen::MatrixXcd p = probe.at_omega(w);
        // Scale-aware: products like K G K carry the integrator's 1/w^2
        // growth, so symbolic-cancellation debris must be judged against the
        // magnitude of the surviving entries, not absolutely.
        const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
        for (int i = 0; i < cfg.n; ++i)
            for (int j = 0; j < cfg.n; ++j)
                if (i != j && std::abs(p(i, j)) > tol * scale) return false;
    }
    return true;
}

bool kgk_in_subspace(const PlatoonConfig& cfg, const RationalFn& g_core, const TfMatrix& k,
                     double tol, int grid_points) {
    TfMatrix g = build_plant(cfg, g_core);
    return qi_subspace_check(cfg, k * g * k, tol, grid_points);
}

LocalDesign leader_effort_h2(const PlatoonDcf& dcf, const QBasis& basis,
                             const DesignOptions& opt) {
    const auto atoms = basis.atoms();
    const RationalFn H = headway_filter(dcf.headway);
    const RationalFn Hi = H.inverse();
    const RationalFn &X = dcf.core.X, &M = dcf.core.M, &N = dcf.core.N;

    std::vector<AffineTerm> terms;
    for (int k = 1; k <= dcf.n; ++k) {
        RationalFn scale = dcf.phi[0] * dcf.phi[static_cast<size_t>(k)].inverse() * Hi.pow(k);
        AffineTerm t;
        t.a = X * N * scale;
        t.b = {{0, H * M * N * scale}};
        if (!t.a.is_strictly_proper() || !t.b[0].second.is_strictly_proper())
            throw InfiniteCost("leader effort column is not strictly proper");
        terms.push_back(t);
    }
    GridData g = tabulate(terms, 1, atoms, opt);
    Eigen::VectorXd x = h2_ls(g);

    LocalDesign out;
    out.q = assemble_slot(x, 0, atoms);
    out.basis_limited = coefficients_blown(x);
    std::vector<RationalFn> column;
    for (const auto& t : terms) column.push_back(substitute(t, {out.q}));
    out.cost = h2_norm(column_of(column));
    out.grid_estimate = out.cost; // quadratic path reports the certified value
    out.diagonal_cost = out.cost;
    return out;
}

TfMatrix plant_of(const PlatoonDcf& dcf) {
    std::vector<RationalFn> cores;
    for (int k = 1; k <= dcf.n; ++k) cores.push_back(dcf.phi[static_cast<size_t>(k)] * dcf.g_core);
    return build_T(dcf.n, dcf.headway) * TfMatrix::diagonal(cores);
}

TfMatrix leader_column_of(const PlatoonDcf& dcf) {
    TfMatrix v(dcf.n, 1);
    v.set(0, 0, dcf.phi[0] * dcf.g_core);
    return v;
}

double sensitivity_offdiag_max(const PlatoonDcf& dcf, const TfMatrix& k, int grid_points) {
    TfMatrix g = plant_of(dcf);
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(dcf.n, dcf.n);
    double worst = 0.0;
    for (double w : log_grid(1e-3, 1e3, grid_points)) {
        Eigen::MatrixXcd s = (eye + g.at_omega(w) * k.at_omega(w)).partialPivLu().solve(eye);
        for (int i = 0; i < dcf.n; ++i)
            for (int j = 0; j < dcf.n; ++j)
                if (i != j) worst = std::max(worst, std::abs(s(i, j)));
    }
    return worst;
}

double leader_response_tail_max(const PlatoonDcf& dcf, const TfMatrix& k, int grid_points) {
    double worst = 0.0;
    for (double w : log_grid(1e-3, 1e3, grid_points))
        worst = std::max(worst, leader_response_tail_at(dcf, k, w));
    return worst;
}

double leader_response_tail_at(const PlatoonDcf& dcf, const TfMatrix& k, double omega) {
    TfMatrix g = plant_of(dcf);
    TfMatrix lead = leader_column_of(dcf);
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(dcf.n, dcf.n);
    Eigen::MatrixXcd r =
        (eye + g.at_omega(omega) * k.at_omega(omega)).partialPivLu().solve(lead.at_omega(omega));
    double worst = 0.0;
    for (int i = 1; i < dcf.n; ++i) worst = std::max(worst, std::abs(r(i, 0)));
    return worst;
}

} // namespace platoon
