#ifndef PLATOON_SIMULATE_HPP
#define PLATOON_SIMULATE_HPP

#include <map>
#include <vector>

#include "platoon/delay.hpp"
#include "platoon/model.hpp"
#include "platoon/synthesis.hpp"

namespace platoon {

// Sampled input signal aligned with the simulation grid; reads past the end
// return zero.
struct Signal {
    std::vector<double> samples;
    double at(size_t i) const { return i < samples.size() ? samples[i] : 0.0; }
    bool empty() const { return samples.empty(); }
};

// Smooth trapezoid: quintic-smoothstep rise over [t0,t1], hold, fall over
// [t2,t3]. Continuously differentiable twice, so discretization error stays
// benign at the default step.
std::vector<double> sample_smooth_pulse(double dt, size_t count, double t0, double t1, double t2,
                                        double t3, double amplitude);
std::vector<double> sample_sine(double dt, size_t count, double amplitude, double omega,
                                double phase = 0.0);

struct SimScenario {
    PlatoonConfig cfg;
    LeaderInfoController controller;
    DelayConfig delays;
    double dt_s = 1e-3;
    double duration_s = 60.0;
    Signal u0_profile;
    std::map<int, Signal> disturbances; // vehicle index (0 = leader) -> w_k
    // Comparison mode: route inputs through the rational delay approximant
    // instead of exact sample shifts.
    bool rational_delays = false;
};

struct SimResult {
    std::vector<double> t;
    std::vector<std::vector<double>> y; // positions, index 0 = leader
    std::vector<std::vector<double>> v; // velocities, index 0 = leader
    std::vector<std::vector<double>> z; // spacing errors, z[j] = vehicle j+1
    std::vector<std::vector<double>> u; // controls, u[j] = vehicle j+1
};

// Fixed-step closed-loop simulation. Every block (vehicle dynamics, local
// gains, feedforward filters) is discretized with an exact zero-order hold;
// the synchronized deployment is equivalent to one uniform theta+phi lag at
// every plant input, realized as ring-buffer sample shifts (or the rational
// approximant when the scenario asks for the comparison mode). All states
// start at zero: the initial formation is exact and z == 0 until an input
// acts. Throws NonIntegerDelay when theta+phi is not an integer number of
// samples and Divergence when any signal magnitude exceeds 1e9.
SimResult simulate(const SimScenario& sc);

struct MetricsReport {
    std::vector<double> peak_z;        // per follower
    std::vector<double> peak_u;        // per follower
    std::vector<double> settle_s;      // last time |z_k| > 2% of its peak
    std::vector<double> amplification; // peak z_{k+1} / peak z_k
};

MetricsReport metrics(const SimResult& r);

// The six-vehicle heterogeneous reference study: delay-absorbed design core,
// per-vehicle peak-gain optimization, synchronization compensation, and a
// 60 s run with a leader maneuver and a mid-string disturbance pulse.
struct ReferenceExample {
    PlatoonConfig cfg;
    DelayConfig delays;
    PlatoonDcf dcf;
    LeaderInfoController controller;
    SimScenario scenario;
    SimResult result;
};

ReferenceExample run_reference_example();

// The reference platoon parameters by themselves (vehicle table, headway,
// latencies), so tests and the CLI can build variations.
PlatoonConfig reference_config();
DelayConfig reference_delays();
SimScenario reference_scenario(const PlatoonConfig& cfg, const LeaderInfoController& c,
                               const DelayConfig& d);

} // namespace platoon

#endif
