#include "platoon/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "platoon/coprime.hpp"
#include "platoon/errors.hpp"
#include "platoon/pade.hpp"
#include "platoon/state_space.hpp"

namespace platoon {

namespace {

double smoothstep5(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

// One SISO block with zero-order-hold dynamics and per-step advance.
struct Block {
    DiscreteSS d;
    Eigen::VectorXd x;

    explicit Block(const RationalFn& f, double dt) {
        StateSpace ss = to_state_space(f);
        d = zoh_discretize(ss, dt);
        x = Eigen::VectorXd::Zero(ss.order());
    }
    double step(double in) {
        double out = (d.C * x).value() + d.D(0, 0) * in;
        x = d.Ad * x + d.Bd * in;
        return out;
    }
};

// Vehicle dynamics with position and velocity read-outs. The core transfer
// function is strictly proper of relative degree >= 2, so the velocity row
// C A has no feedthrough.
struct Vehicle {
    Eigen::MatrixXd Ad, Bd;
    Eigen::RowVectorXd Cy, Cv;
    Eigen::VectorXd x;

    Vehicle(const RationalFn& core, double dt) {
        StateSpace ss = to_state_space(core);
        DiscreteSS d = zoh_discretize(ss, dt);
        Ad = d.Ad;
        Bd = d.Bd;
        Cy = ss.C.row(0);
        Cv = ss.C.row(0) * ss.A;
        x = Eigen::VectorXd::Zero(ss.order());
    }
    double position() const { return (Cy * x).value(); }
    double velocity() const { return (Cv * x).value(); }
    void advance(double in) { x = Ad * x + Bd * in; }
};

// Exact sample delay (ring buffer) or its rational stand-in.
struct InputChannel {
    std::vector<double> buf;
    size_t pos = 0;
    std::unique_ptr<Block> rational;

    InputChannel(size_t lag, const RationalFn* approx, double dt) {
        if (approx != nullptr && !approx->is_zero() && lag > 0) {
            rational = std::make_unique<Block>(*approx, dt);
        } else {
            buf.assign(lag, 0.0);
        }
    }
    double step(double in) {
        if (rational) return rational->step(in);
        if (buf.empty()) return in;
        double out = buf[pos];
        buf[pos] = in;
        pos = (pos + 1) % buf.size();
        return out;
    }
};

} // namespace

std::vector<double> sample_smooth_pulse(double dt, size_t count, double t0, double t1, double t2,
                                        double t3, double amplitude) {
    if (!(t0 <= t1 && t1 <= t2 && t2 <= t3)) throw InvalidParameter("pulse times must be ordered");
    std::vector<double> out(count);
    for (size_t i = 0; i < count; ++i) {
        double t = dt * static_cast<double>(i);
        double up = (t1 > t0) ? smoothstep5((t - t0) / (t1 - t0)) : (t >= t0 ? 1.0 : 0.0);
        double down = (t3 > t2) ? smoothstep5((t - t2) / (t3 - t2)) : (t >= t3 ? 1.0 : 0.0);
        out[i] = amplitude * (up - down);
    }
    return out;
}

std::vector<double> sample_sine(double dt, size_t count, double amplitude, double omega,
                                double phase) {
    std::vector<double> out(count);
    for (size_t i = 0; i < count; ++i)
        out[i] = amplitude * std::sin(omega * dt * static_cast<double>(i) + phase);
    return out;
}

SimResult simulate(const SimScenario& sc) {
    sc.cfg.validate();
    sc.delays.validate();
    if (!(sc.dt_s > 0.0)) throw InvalidParameter("time step must be positive");
    if (!(sc.duration_s > 0.0)) throw InvalidParameter("duration must be positive");
    if (sc.controller.n != sc.cfg.n)
        throw InvalidParameter("controller and platoon sizes differ");
    if (std::abs(sc.controller.headway - sc.cfg.headway) > 1e-12)
        throw InvalidParameter("controller and platoon headway differ");

    const int n = sc.cfg.n;
    const double dt = sc.dt_s;
    const double lag_s = sc.delays.total();
    double lag_samples = lag_s / dt;
    if (std::abs(lag_samples - std::round(lag_samples)) > 1e-9)
        throw NonIntegerDelay("theta+phi = " + std::to_string(lag_s) +
                              " s is not an integer number of samples at dt = " +
                              std::to_string(dt));
    const size_t lag = static_cast<size_t>(std::llround(lag_samples));
    const size_t steps = static_cast<size_t>(std::llround(sc.duration_s / dt)) + 1;

    const RationalFn g_wp = base_plant();
    std::vector<Vehicle> plant;
    plant.reserve(static_cast<size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
        plant.emplace_back(build_phi(sc.cfg.vehicle(k)) * g_wp, dt);

    std::vector<Block> local;
    std::vector<Block> feedfwd;
    for (int k = 1; k <= n; ++k) local.emplace_back(sc.controller.local_gain[static_cast<size_t>(k - 1)], dt);
    for (int k = 2; k <= n; ++k) feedfwd.emplace_back(sc.controller.ff_gain[static_cast<size_t>(k - 2)], dt);

    RationalFn approx;
    const RationalFn* approx_ptr = nullptr;
    if (sc.rational_delays && lag > 0) {
        approx = pade_approx(lag_s, sc.delays.pade_order);
        approx_ptr = &approx;
    }
    std::vector<InputChannel> channel;
    for (int k = 0; k <= n; ++k) channel.emplace_back(lag, approx_ptr, dt);

    SimResult r;
    r.t.resize(steps);
    r.y.assign(static_cast<size_t>(n) + 1, std::vector<double>(steps));
    r.v.assign(static_cast<size_t>(n) + 1, std::vector<double>(steps));
    r.z.assign(static_cast<size_t>(n), std::vector<double>(steps));
    r.u.assign(static_cast<size_t>(n), std::vector<double>(steps));

    auto disturbance = [&sc](int k, size_t i) {
        auto it = sc.disturbances.find(k);
        return it == sc.disturbances.end() ? 0.0 : it->second.at(i);
    };

    std::vector<double> uk(static_cast<size_t>(n) + 1, 0.0);
    for (size_t i = 0; i < steps; ++i) {
        r.t[i] = dt * static_cast<double>(i);

        for (int k = 0; k <= n; ++k) {
            r.y[static_cast<size_t>(k)][i] = plant[static_cast<size_t>(k)].position();
            r.v[static_cast<size_t>(k)][i] = plant[static_cast<size_t>(k)].velocity();
        }
        // Spacing errors from the freshly read states, then the control
        // recursion downstream: vehicle k needs u_{k-1} of this same instant,
        // which the synchronized deployment provides.
        for (int k = 1; k <= n; ++k) {
            double zk = r.y[static_cast<size_t>(k - 1)][i] - r.y[static_cast<size_t>(k)][i] -
                        sc.cfg.headway * r.v[static_cast<size_t>(k)][i];
            r.z[static_cast<size_t>(k - 1)][i] = zk;
            double out = local[static_cast<size_t>(k - 1)].step(zk);
            if (k >= 2) out += feedfwd[static_cast<size_t>(k - 2)].step(uk[static_cast<size_t>(k - 1)]);
            uk[static_cast<size_t>(k)] = out;
            r.u[static_cast<size_t>(k - 1)][i] = out;
        }

        double u0 = sc.u0_profile.at(i);
        for (int k = 0; k <= n; ++k) {
            double raw = (k == 0 ? u0 : uk[static_cast<size_t>(k)]) + disturbance(k, i);
            plant[static_cast<size_t>(k)].advance(channel[static_cast<size_t>(k)].step(raw));
        }

        for (int k = 1; k <= n; ++k) {
            double worst = std::max({std::abs(r.y[static_cast<size_t>(k)][i]),
                                     std::abs(r.z[static_cast<size_t>(k - 1)][i]),
                                     std::abs(r.u[static_cast<size_t>(k - 1)][i])});
            if (!(worst <= 1e9))
                throw Divergence("signal exceeded 1e9 at vehicle " + std::to_string(k) +
                                 ", t = " + std::to_string(r.t[i]) + " s");
        }
    }
    return r;
}

MetricsReport metrics(const SimResult& r) {
    MetricsReport m;
    const size_t n = r.z.size();
    m.peak_z.resize(n, 0.0);
    m.peak_u.resize(n, 0.0);
    m.settle_s.resize(n, 0.0);
    for (size_t k = 0; k < n; ++k) {
        for (double v : r.z[k]) m.peak_z[k] = std::max(m.peak_z[k], std::abs(v));
        for (double v : r.u[k]) m.peak_u[k] = std::max(m.peak_u[k], std::abs(v));
        if (m.peak_z[k] > 0.0) {
            double level = 0.02 * m.peak_z[k];
            for (size_t i = r.z[k].size(); i-- > 0;) {
                if (std::abs(r.z[k][i]) > level) {
                    m.settle_s[k] = r.t[i];
                    break;
                }
            }
        }
    }
    for (size_t k = 0; k + 1 < n; ++k) {
        double denom = m.peak_z[k];
        double num = m.peak_z[k + 1];
        m.amplification.push_back(denom > 0.0 ? num / denom : (num > 0.0 ? 1e300 : 0.0));
    }
    return m;
}

PlatoonConfig reference_config() {
    PlatoonConfig cfg;
    cfg.n = 6;
    cfg.headway = 0.5;
    cfg.leader = {5.0, 0.1, 2.0};
    cfg.vehicles = {
        {8.0, 0.1, 1.0}, {4.0, 0.2, 2.0}, {1.0, 0.05, 3.0},
        {3.0, 0.1, 4.0}, {2.0, 0.1, 5.0}, {7.0, 0.3, 6.0},
    };
    cfg.validate();
    return cfg;
}

DelayConfig reference_delays() { return {0.03, 0.1, 3}; }

SimScenario reference_scenario(const PlatoonConfig& cfg, const LeaderInfoController& c,
                               const DelayConfig& d) {
    SimScenario sc;
    sc.cfg = cfg;
    sc.controller = c;
    sc.delays = d;
    sc.dt_s = 1e-3;
    sc.duration_s = 60.0;
    const size_t count = static_cast<size_t>(std::llround(sc.duration_s / sc.dt_s)) + 1;
    // Leader maneuver: accelerate, cruise, then brake to a slower speed.
    Signal u0;
    u0.samples = sample_smooth_pulse(sc.dt_s, count, 2.0, 4.0, 12.0, 14.0, 1.0);
    auto brake = sample_smooth_pulse(sc.dt_s, count, 20.0, 22.0, 30.0, 32.0, -0.8);
    for (size_t i = 0; i < count; ++i) u0.samples[i] += brake[i];
    sc.u0_profile = u0;
    // Mid-string disturbance pulse at vehicle 4.
    Signal w4;
    w4.samples = sample_smooth_pulse(sc.dt_s, count, 38.0, 39.5, 44.0, 45.5, 0.5);
    sc.disturbances[4] = w4;
    return sc;
}

ReferenceExample run_reference_example() {
    ReferenceExample ex;
    ex.cfg = reference_config();
    ex.delays = reference_delays();

    RationalFn core = base_plant_with_delay(ex.delays.total(), ex.delays.pade_order);
    ScalarDcf scalar = scalar_dcf(core);
    ex.dcf = platoon_dcf(ex.cfg, scalar, ex.delays.total(), ex.delays.pade_order);

    QBasis basis;
    DiagonalYoula youla;
    youla.q.resize(static_cast<size_t>(ex.cfg.n));
    for (int j = 1; j <= ex.cfg.n; ++j)
        youla.q[static_cast<size_t>(j - 1)] = local_hinf_design(ex.dcf, j, basis).q;

    LeaderInfoController ideal = build_controller(ex.dcf, youla);
    ex.controller = compensated_controller(ideal, ex.delays);
    ex.scenario = reference_scenario(ex.cfg, ex.controller, ex.delays);
    ex.result = simulate(ex.scenario);
    return ex;
}

} // namespace platoon
