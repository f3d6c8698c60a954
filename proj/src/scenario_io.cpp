#include "platoon/scenario_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "platoon/errors.hpp"

namespace platoon {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw SchemaError(path + ": " + what);
}

const json& member(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing required key '" + key + "'");
    return *it;
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& known) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (known.count(it.key()) == 0) fail(path, "unknown key '" + it.key() + "'");
    }
}

double number_at(const json& obj, const std::string& path, const std::string& key) {
    const json& v = member(obj, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& path, const std::string& key, double dflt) {
    if (!obj.is_object() || obj.find(key) == obj.end()) return dflt;
    return number_at(obj, path, key);
}

int int_at(const json& obj, const std::string& path, const std::string& key) {
    const json& v = member(obj, path, key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

int int_or(const json& obj, const std::string& path, const std::string& key, int dflt) {
    if (!obj.is_object() || obj.find(key) == obj.end()) return dflt;
    return int_at(obj, path, key);
}

bool bool_or(const json& obj, const std::string& path, const std::string& key, bool dflt) {
    if (!obj.is_object() || obj.find(key) == obj.end()) return dflt;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

std::string string_at(const json& obj, const std::string& path, const std::string& key) {
    const json& v = member(obj, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

VehicleParams parse_vehicle(const json& v, const std::string& path) {
    reject_unknown(v, path, {"mass_kg", "tau_s", "sigma_rad_s"});
    VehicleParams p;
    p.mass = number_at(v, path, "mass_kg");
    p.tau = number_at(v, path, "tau_s");
    p.sigma = number_at(v, path, "sigma_rad_s");
    return p;
}

WaveformSpec parse_waveform(const json& w, const std::string& path) {
    WaveformSpec spec;
    std::string kind = string_at(w, path, "kind");
    if (kind == "zero") {
        reject_unknown(w, path, {"kind"});
        spec.kind = WaveformSpec::Kind::zero;
    } else if (kind == "smooth_pulse") {
        reject_unknown(w, path, {"kind", "amplitude", "t_rise_start_s", "t_rise_end_s",
                                 "t_fall_start_s", "t_fall_end_s"});
        spec.kind = WaveformSpec::Kind::smooth_pulse;
        spec.amplitude = number_at(w, path, "amplitude");
        spec.t0 = number_at(w, path, "t_rise_start_s");
        spec.t1 = number_at(w, path, "t_rise_end_s");
        spec.t2 = number_at(w, path, "t_fall_start_s");
        spec.t3 = number_at(w, path, "t_fall_end_s");
    } else if (kind == "sine") {
        reject_unknown(w, path, {"kind", "amplitude", "omega_rad_s", "phase_rad"});
        spec.kind = WaveformSpec::Kind::sine;
        spec.amplitude = number_at(w, path, "amplitude");
        spec.omega = number_at(w, path, "omega_rad_s");
        spec.phase = number_or(w, path, "phase_rad", 0.0);
    } else if (kind == "samples") {
        reject_unknown(w, path, {"kind", "values"});
        spec.kind = WaveformSpec::Kind::samples;
        const json& vals = member(w, path, "values");
        if (!vals.is_array()) fail(path + ".values", "expected an array");
        for (const auto& x : vals) {
            if (!x.is_number()) fail(path + ".values", "expected numbers");
            spec.values.push_back(x.get<double>());
        }
    } else {
        fail(path + ".kind", "unknown waveform kind '" + kind + "'");
    }
    return spec;
}

std::vector<WaveformSpec> parse_waveform_list(const json& arr, const std::string& path) {
    if (!arr.is_array()) fail(path, "expected an array of waveforms");
    std::vector<WaveformSpec> out;
    int i = 0;
    for (const auto& w : arr) out.push_back(parse_waveform(w, path + "[" + std::to_string(i++) + "]"));
    return out;
}

json rational_to_json(const RationalFn& f) {
    json j;
    std::vector<double> num = f.num().coeffs();
    std::vector<double> den = f.den().coeffs();
    if (num.empty()) num.push_back(0.0); // the zero function
    if (den.empty()) den.push_back(1.0);
    j["num"] = num;
    j["den"] = den;
    return j;
}

RationalFn rational_from_json(const json& j, const std::string& path) {
    reject_unknown(j, path, {"num", "den"});
    auto read = [&](const char* key) {
        const json& arr = member(j, path, key);
        if (!arr.is_array() || arr.empty()) fail(path + "." + key, "expected a coefficient array");
        std::vector<double> c;
        for (const auto& x : arr) {
            if (!x.is_number()) fail(path + "." + key, "expected numbers");
            c.push_back(x.get<double>());
        }
        return Polynomial(c);
    };
    Polynomial num = read("num");
    Polynomial den = read("den");
    if (den.degree() < 0) fail(path + ".den", "denominator must be nonzero");
    return RationalFn(num, den);
}

json rational_list_to_json(const std::vector<RationalFn>& fs) {
    json arr = json::array();
    for (const auto& f : fs) arr.push_back(rational_to_json(f));
    return arr;
}

std::vector<RationalFn> rational_list_from_json(const json& arr, const std::string& path,
                                                size_t expect) {
    if (!arr.is_array()) fail(path, "expected an array");
    if (arr.size() != expect)
        fail(path, "expected " + std::to_string(expect) + " entries, got " +
                       std::to_string(arr.size()));
    std::vector<RationalFn> out;
    int i = 0;
    for (const auto& j : arr)
        out.push_back(rational_from_json(j, path + "[" + std::to_string(i++) + "]"));
    return out;
}

} // namespace

ScenarioSpec parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    reject_unknown(root, "$", {"platoon", "design", "delays", "simulation"});

    ScenarioSpec spec;
    const json& pl = member(root, "$", "platoon");
    reject_unknown(pl, "$.platoon",
                   {"n", "headway_s", "leader", "vehicles", "absorb_delay", "pade_order"});
    spec.cfg.n = int_at(pl, "$.platoon", "n");
    spec.cfg.headway = number_at(pl, "$.platoon", "headway_s");
    spec.cfg.leader = parse_vehicle(member(pl, "$.platoon", "leader"), "$.platoon.leader");
    const json& veh = member(pl, "$.platoon", "vehicles");
    if (!veh.is_array()) fail("$.platoon.vehicles", "expected an array");
    int i = 0;
    for (const auto& v : veh)
        spec.cfg.vehicles.push_back(
            parse_vehicle(v, "$.platoon.vehicles[" + std::to_string(i++) + "]"));
    if (static_cast<int>(spec.cfg.vehicles.size()) != spec.cfg.n)
        fail("$.platoon.vehicles", "expected exactly n = " + std::to_string(spec.cfg.n) +
                                       " vehicles, got " + std::to_string(spec.cfg.vehicles.size()));
    spec.absorb_delay = bool_or(pl, "$.platoon", "absorb_delay", true);
    spec.pade_order = int_or(pl, "$.platoon", "pade_order", 3);

    if (root.find("design") != root.end()) {
        const json& de = root.at("design");
        reject_unknown(de, "$.design",
                       {"norm", "basis_degree", "basis_pole_s", "grid_points", "grid_lo_rad_s",
                        "grid_hi_rad_s", "parallel"});
        if (de.find("norm") != de.end()) {
            std::string norm = string_at(de, "$.design", "norm");
            if (norm == "h2") {
                spec.design.norm = DesignNorm::h2;
            } else if (norm == "hinf") {
                spec.design.norm = DesignNorm::hinf;
            } else {
                fail("$.design.norm", "expected 'h2' or 'hinf'");
            }
        }
        spec.design.basis.degree = int_or(de, "$.design", "basis_degree", spec.design.basis.degree);
        spec.design.basis.lambda =
            number_or(de, "$.design", "basis_pole_s", spec.design.basis.lambda);
        spec.design.options.grid_points =
            int_or(de, "$.design", "grid_points", spec.design.options.grid_points);
        spec.design.options.grid_lo =
            number_or(de, "$.design", "grid_lo_rad_s", spec.design.options.grid_lo);
        spec.design.options.grid_hi =
            number_or(de, "$.design", "grid_hi_rad_s", spec.design.options.grid_hi);
        spec.design.options.parallel = bool_or(de, "$.design", "parallel", false);
    }

    if (root.find("delays") != root.end()) {
        const json& dl = root.at("delays");
        reject_unknown(dl, "$.delays", {"theta_s", "phi_s"});
        spec.delays.theta_s = number_or(dl, "$.delays", "theta_s", 0.0);
        spec.delays.phi_s = number_or(dl, "$.delays", "phi_s", 0.0);
    }
    spec.delays.pade_order = spec.pade_order;

    const json& si = member(root, "$", "simulation");
    reject_unknown(si, "$.simulation", {"dt_s", "duration_s", "u0", "disturbances"});
    spec.dt_s = number_at(si, "$.simulation", "dt_s");
    spec.duration_s = number_at(si, "$.simulation", "duration_s");
    if (si.find("u0") != si.end()) spec.u0 = parse_waveform_list(si.at("u0"), "$.simulation.u0");
    if (si.find("disturbances") != si.end()) {
        const json& ds = si.at("disturbances");
        if (!ds.is_object()) fail("$.simulation.disturbances", "expected an object");
        for (auto it = ds.begin(); it != ds.end(); ++it) {
            char* end = nullptr;
            long k = std::strtol(it.key().c_str(), &end, 10);
            if (end == it.key().c_str() || *end != '\0' || k < 0 || k > spec.cfg.n)
                fail("$.simulation.disturbances", "key '" + it.key() +
                                                      "' is not a vehicle index in 0.." +
                                                      std::to_string(spec.cfg.n));
            spec.disturbances[static_cast<int>(k)] = parse_waveform_list(
                it.value(), "$.simulation.disturbances." + it.key());
        }
    }

    try {
        spec.cfg.validate();
        spec.delays.validate();
    } catch (const Error& e) {
        throw SchemaError(std::string("invalid physical parameters: ") + e.what());
    }
    if (!(spec.dt_s > 0.0)) fail("$.simulation.dt_s", "must be positive");
    if (!(spec.duration_s > 0.0)) fail("$.simulation.duration_s", "must be positive");
    return spec;
}

ScenarioSpec load_scenario(const std::string& path) { return parse_scenario(read_text_file(path)); }

Signal render_signal(const std::vector<WaveformSpec>& specs, double dt, size_t count) {
    Signal s;
    s.samples.assign(count, 0.0);
    for (const auto& w : specs) {
        switch (w.kind) {
            case WaveformSpec::Kind::zero:
                break;
            case WaveformSpec::Kind::smooth_pulse: {
                auto p = sample_smooth_pulse(dt, count, w.t0, w.t1, w.t2, w.t3, w.amplitude);
                for (size_t i = 0; i < count; ++i) s.samples[i] += p[i];
                break;
            }
            case WaveformSpec::Kind::sine: {
                auto p = sample_sine(dt, count, w.amplitude, w.omega, w.phase);
                for (size_t i = 0; i < count; ++i) s.samples[i] += p[i];
                break;
            }
            case WaveformSpec::Kind::samples: {
                for (size_t i = 0; i < count && i < w.values.size(); ++i)
                    s.samples[i] += w.values[i];
                break;
            }
        }
    }
    return s;
}

PlatoonDcf dcf_of(const ScenarioSpec& spec) {
    double absorbed = spec.absorb_delay ? spec.delays.total() : 0.0;
    RationalFn core = absorbed > 0.0 ? base_plant_with_delay(absorbed, spec.pade_order)
                                     : base_plant();
    ScalarDcf scalar = scalar_dcf(core);
    return platoon_dcf(spec.cfg, scalar, absorbed, absorbed > 0.0 ? spec.pade_order : 0);
}

SimScenario make_sim_scenario(const ScenarioSpec& spec, const LeaderInfoController& c) {
    SimScenario sc;
    sc.cfg = spec.cfg;
    sc.controller = c;
    sc.delays = spec.delays;
    sc.dt_s = spec.dt_s;
    sc.duration_s = spec.duration_s;
    const size_t count = static_cast<size_t>(std::llround(spec.duration_s / spec.dt_s)) + 1;
    sc.u0_profile = render_signal(spec.u0, spec.dt_s, count);
    for (const auto& [k, specs] : spec.disturbances)
        sc.disturbances[k] = render_signal(specs, spec.dt_s, count);
    return sc;
}

std::string controller_to_json(const LeaderInfoController& c) {
    json j;
    j["format"] = "platoon-controller-v1";
    j["n"] = c.n;
    j["headway_s"] = c.headway;
    j["alpha"] = c.alpha;
    j["design_delay_s"] = c.design_delay_s;
    j["design_pade_order"] = c.design_pade_order;
    j["broadcast_delay_s"] = c.broadcast_delay_s;
    j["measurement_delay_s"] = c.measurement_delay_s;
    j["phi"] = rational_list_to_json(c.phi);
    j["youla"] = rational_list_to_json(c.youla.q);
    j["local_k"] = rational_list_to_json(c.local_k);
    j["local_gain"] = rational_list_to_json(c.local_gain);
    j["feedforward"] = rational_list_to_json(c.feedforward);
    j["ff_gain"] = rational_list_to_json(c.ff_gain);
    return j.dump(2) + "\n";
}

LeaderInfoController controller_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    reject_unknown(j, "$",
                   {"format", "n", "headway_s", "alpha", "design_delay_s", "design_pade_order",
                    "broadcast_delay_s", "measurement_delay_s", "phi", "youla", "local_k",
                    "local_gain", "feedforward", "ff_gain"});
    if (string_at(j, "$", "format") != "platoon-controller-v1")
        fail("$.format", "unsupported controller format");

    LeaderInfoController c;
    c.n = int_at(j, "$", "n");
    if (c.n < 1) fail("$.n", "must be at least 1");
    c.headway = number_at(j, "$", "headway_s");
    c.alpha = number_at(j, "$", "alpha");
    c.design_delay_s = number_at(j, "$", "design_delay_s");
    c.design_pade_order = int_at(j, "$", "design_pade_order");
    c.broadcast_delay_s = number_at(j, "$", "broadcast_delay_s");
    c.measurement_delay_s = number_at(j, "$", "measurement_delay_s");

    size_t n = static_cast<size_t>(c.n);
    c.phi = rational_list_from_json(member(j, "$", "phi"), "$.phi", n + 1);
    c.youla.q = rational_list_from_json(member(j, "$", "youla"), "$.youla", n);
    c.local_k = rational_list_from_json(member(j, "$", "local_k"), "$.local_k", n);
    c.local_gain = rational_list_from_json(member(j, "$", "local_gain"), "$.local_gain", n);
    c.feedforward = rational_list_from_json(member(j, "$", "feedforward"), "$.feedforward", n - 1);
    c.ff_gain = rational_list_from_json(member(j, "$", "ff_gain"), "$.ff_gain", n - 1);
    return c;
}

LeaderInfoController load_controller(const std::string& path) {
    return controller_from_json(read_text_file(path));
}

std::string to_csv(const SimResult& r) {
    const size_t n = r.z.size();
    std::string out = "t,y_0,v_0";
    for (size_t k = 1; k <= n; ++k) {
        std::string i = std::to_string(k);
        out += ",y_" + i + ",v_" + i + ",z_" + i + ",u_" + i;
    }
    out += "\n";
    char buf[64];
    auto cell = [&out, &buf](double v) {
        out.push_back(',');
        int m = std::snprintf(buf, sizeof buf, "%.12g", v);
        out.append(buf, static_cast<size_t>(m));
    };
    for (size_t i = 0; i < r.t.size(); ++i) {
        int len = std::snprintf(buf, sizeof buf, "%.12g", r.t[i]);
        out.append(buf, static_cast<size_t>(len));
        cell(r.y[0][i]);
        cell(r.v[0][i]);
        for (size_t k = 1; k <= n; ++k) {
            cell(r.y[k][i]);
            cell(r.v[k][i]);
            cell(r.z[k - 1][i]);
            cell(r.u[k - 1][i]);
        }
        out.push_back('\n');
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

} // namespace platoon
