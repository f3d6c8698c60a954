#ifndef PLATOON_SCENARIO_IO_HPP
#define PLATOON_SCENARIO_IO_HPP

#include <map>
#include <string>
#include <vector>

#include "platoon/delay.hpp"
#include "platoon/model.hpp"
#include "platoon/simulate.hpp"
#include "platoon/synthesis.hpp"

namespace platoon {

// One additive input component. Signals are rendered on the simulation grid
// when a run is assembled, so the same scenario stays valid under --dt.
struct WaveformSpec {
    enum class Kind { zero, smooth_pulse, sine, samples };
    Kind kind = Kind::zero;
    double amplitude = 0.0;
    double t0 = 0.0, t1 = 0.0, t2 = 0.0, t3 = 0.0; // smooth_pulse corners
    double omega = 0.0, phase = 0.0;               // sine
    std::vector<double> values;                    // samples
};

struct DesignSpec {
    DesignNorm norm = DesignNorm::hinf;
    QBasis basis;
    DesignOptions options;
};

// Parsed scenario file. Parsing is strict: unknown keys, wrong types, or
// missing required keys raise SchemaError with the offending path.
struct ScenarioSpec {
    PlatoonConfig cfg;
    bool absorb_delay = true; // fold theta+phi into the design plant core
    int pade_order = 3;
    DesignSpec design;
    DelayConfig delays;
    double dt_s = 1e-3;
    double duration_s = 60.0;
    std::vector<WaveformSpec> u0;
    std::map<int, std::vector<WaveformSpec>> disturbances;
};

ScenarioSpec parse_scenario(const std::string& json_text);
ScenarioSpec load_scenario(const std::string& path);

// Sum of rendered waveform components on the simulation grid.
Signal render_signal(const std::vector<WaveformSpec>& specs, double dt, size_t count);

// Design factorization and runnable scenario assembled from the parsed spec.
PlatoonDcf dcf_of(const ScenarioSpec& spec);
SimScenario make_sim_scenario(const ScenarioSpec& spec, const LeaderInfoController& c);

// Controller round trip. Coefficients are written with shortest-round-trip
// doubles; reloading re-factors them, so the realization is reproduced to
// floating-point accuracy rather than bit for bit.
std::string controller_to_json(const LeaderInfoController& c);
LeaderInfoController controller_from_json(const std::string& json_text);
LeaderInfoController load_controller(const std::string& path);

std::string to_csv(const SimResult& r);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace platoon

#endif
