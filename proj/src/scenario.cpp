#include "focsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "focsim/errors.hpp"

namespace focsim {

using nlohmann::json;

std::string to_string(ModulatorKind k) {
    return k == ModulatorKind::svm ? "svm" : "hysteresis";
}

SpeedProfile::SpeedProfile(std::vector<Waypoint> points) : points_(std::move(points)) {
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i].t_s > points_[i - 1].t_s)) {
            throw ConfigError("speed reference waypoints must be strictly time-ordered");
        }
    }
}

double SpeedProfile::at(double t) const {
    double value = 0.0;
    double t_prev = 0.0;
    for (const auto& wp : points_) {
        if (wp.t_s > t) {
            if (wp.shape == Shape::ramp) {
                const double frac = (t - t_prev) / (wp.t_s - t_prev);
                return value + std::clamp(frac, 0.0, 1.0) * (wp.omega_m - value);
            }
            return value;
        }
        value = wp.omega_m;
        t_prev = wp.t_s;
    }
    return value;
}

double SpeedProfile::final_value() const {
    return points_.empty() ? 0.0 : points_.back().omega_m;
}

double Scenario::v_dc() const {
    return modulator.v_dc > 0.0 ? modulator.v_dc : std::sqrt(3.0) * motor.v_max;
}

GainSet Scenario::gains() const {
    if (controller.gains) {
        return *controller.gains;
    }
    return tune_gains(motor, controller.current_bandwidth_rad_s,
                      controller.speed_bandwidth_rad_s);
}

const std::vector<std::string>& available_signals() {
    static const std::vector<std::string> kSignals{
        "omega_ref", "omega_m", "theta_e", "i_d",      "i_q",      "i_a",       "i_b",
        "i_c",       "id_ref",  "iq_ref",  "iq_demand", "v_d_cmd", "v_q_cmd",   "v_cmd_mag",
        "v_a",       "v_b",     "v_c",     "v_d",       "v_q",     "torque",    "load_torque"};
    return kSignals;
}

namespace {

bool is_integer_ratio(double num, double den) {
    const double r = num / den;
    return r >= 1.0 - 1e-9 && std::abs(r - std::round(r)) < 1e-6;
}

}  // namespace

void Scenario::validate() const {
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
        throw ConfigError("duration_s must be positive");
    }
    if (!(plant_dt_s > 0.0) || plant_dt_s > kDefaultMaxStep) {
        throw ConfigError("plant_dt_s must lie in (0, " + std::to_string(kDefaultMaxStep) + "]");
    }
    motor.validate();
    if (!(controller.rate_hz > 0.0)) {
        throw ConfigError("controller rate_hz must be positive");
    }
    if (!is_integer_ratio(1.0 / controller.rate_hz, plant_dt_s)) {
        throw ConfigError("plant_dt_s must divide the controller sample period");
    }
    if (!(modulator.carrier_hz > 0.0) ||
        !is_integer_ratio(controller.rate_hz, modulator.carrier_hz)) {
        throw ConfigError("controller rate must equal or be an integer multiple of carrier_hz");
    }
    if (modulator.v_dc < 0.0) {
        throw ConfigError("v_dc_v must be positive");
    }
    if (!(modulator.hysteresis_band_a > 0.0)) {
        throw ConfigError("hysteresis_band_a must be positive");
    }
    if (!(controller.v_margin > 0.0 && controller.v_margin <= 1.0)) {
        throw ConfigError("v_margin must lie in (0, 1]");
    }
    const GainSet g = gains();
    g.speed.validate();
    g.current_d.validate();
    g.current_q.validate();
    if (!(current_noise_std_a >= 0.0)) {
        throw ConfigError("current_std_a must be >= 0");
    }
    const auto& known = available_signals();
    for (const auto& s : signals) {
        if (std::find(known.begin(), known.end(), s) == known.end()) {
            throw ConfigError("unknown output signal '" + s + "'");
        }
    }
    if (std::find(known.begin(), known.end(), analysis.thd_signal) == known.end()) {
        throw ConfigError("unknown thd_signal '" + analysis.thd_signal + "'");
    }
    if (analysis.thd_max_order < 1 || analysis.thd_periods < 0 || analysis.envelope_points < 0 ||
        analysis.settle_s < 0.0) {
        throw ConfigError("analysis settings out of range");
    }
    if (!std::isfinite(initial.i_d) || !std::isfinite(initial.i_q) ||
        !std::isfinite(initial.omega_m) || !std::isfinite(initial.theta_e)) {
        throw ConfigError("initial_state must be finite");
    }
}

namespace {

// Reads keys from a JSON object and rejects any it was not asked about.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) {
            throw ConfigError(where_ + ": expected an object");
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    const json& at(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) {
            throw ConfigError(where_ + ": missing key '" + key + "'");
        }
        return j_.at(key);
    }

    double number(const std::string& key, double fallback) {
        return has(key) ? as_number(j_.at(key), key) : fallback;
    }

    double number(const std::string& key) { return as_number(at(key), key); }

    std::string string(const std::string& key, std::string fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json& v = j_.at(key);
        if (!v.is_string()) {
            throw ConfigError(where_ + "." + key + ": expected a string");
        }
        return v.get<std::string>();
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError(where_ + ": unknown key '" + key + "'");
            }
        }
    }

    const std::string& where() const { return where_; }

private:
    double as_number(const json& v, const std::string& key) const {
        if (!v.is_number()) {
            throw ConfigError(where_ + "." + key + ": expected a number");
        }
        return v.get<double>();
    }

    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

int as_int(double v, const std::string& what) {
    if (v != std::floor(v)) {
        throw ConfigError(what + ": expected an integer");
    }
    return static_cast<int>(v);
}

MotorParams parse_motor(const json& j) {
    ObjectReader r(j, "motor");
    const std::string preset = r.string("preset", "default");
    MotorParams p = default_motor_params();
    if (preset == "non_salient") {
        p = non_salient_variant(p);
    } else if (preset != "default") {
        throw ConfigError("motor.preset: expected 'default' or 'non_salient'");
    }
    p.r_s = r.number("r_s_ohm", p.r_s);
    p.l_d = r.number("l_d_h", p.l_d);
    p.l_q = r.number("l_q_h", p.l_q);
    p.psi_m = r.number("psi_m_wb", p.psi_m);
    p.pole_pairs = as_int(r.number("pole_pairs", p.pole_pairs), "motor.pole_pairs");
    p.inertia = r.number("inertia_kg_m2", p.inertia);
    p.friction = r.number("friction_nm_s_per_rad", p.friction);
    p.v_max = r.number("v_max_v", p.v_max);
    p.i_max = r.number("i_max_a", p.i_max);
    if (r.has("omega_base_rad_s")) {
        p.omega_base = r.number("omega_base_rad_s");
    } else {
        p.omega_base = corner_speed(p, p.v_max);
    }
    r.finish();
    return p;
}

PiGains parse_pi(const json& j, const std::string& where) {
    ObjectReader r(j, where);
    PiGains g;
    g.kp = r.number("kp");
    g.ki = r.number("ki_per_s");
    g.out_min = r.number("out_min");
    g.out_max = r.number("out_max");
    r.finish();
    return g;
}

ControllerConfig parse_controller(const json& j) {
    ObjectReader r(j, "controller");
    ControllerConfig c;
    c.rate_hz = r.number("rate_hz", c.rate_hz);
    c.current_bandwidth_rad_s = r.number("current_bandwidth_rad_s", c.current_bandwidth_rad_s);
    c.speed_bandwidth_rad_s = r.number("speed_bandwidth_rad_s", c.speed_bandwidth_rad_s);
    c.v_margin = r.number("v_margin", c.v_margin);
    if (r.has("gains")) {
        ObjectReader g(r.at("gains"), "controller.gains");
        GainSet gs;
        gs.speed = parse_pi(g.at("speed"), "controller.gains.speed");
        gs.current_d = parse_pi(g.at("current_d"), "controller.gains.current_d");
        gs.current_q = parse_pi(g.at("current_q"), "controller.gains.current_q");
        g.finish();
        c.gains = gs;
    }
    r.finish();
    return c;
}

ModulatorConfig parse_modulator(const json& j) {
    ObjectReader r(j, "modulator");
    ModulatorConfig m;
    const std::string type = r.string("type", "svm");
    if (type == "svm") {
        m.kind = ModulatorKind::svm;
    } else if (type == "hysteresis") {
        m.kind = ModulatorKind::hysteresis;
    } else {
        throw ConfigError("modulator.type: expected 'svm' or 'hysteresis'");
    }
    m.carrier_hz = r.number("carrier_hz", m.carrier_hz);
    m.v_dc = r.number("v_dc_v", m.v_dc);
    m.hysteresis_band_a = r.number("hysteresis_band_a", m.hysteresis_band_a);
    r.finish();
    return m;
}

// Speeds may be absolute (omega_m_rad_s) or per-unit of mechanical base speed.
double read_speed(ObjectReader& r, double base_mech, double fallback) {
    const bool abs = r.has("omega_m_rad_s");
    const bool pu = r.has("omega_m_pu");
    if (abs && pu) {
        throw ConfigError(r.where() + ": give omega_m_rad_s or omega_m_pu, not both");
    }
    if (abs) {
        return r.number("omega_m_rad_s");
    }
    if (pu) {
        return r.number("omega_m_pu") * base_mech;
    }
    return fallback;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    ObjectReader r(j, "scenario");
    Scenario s;
    s.name = r.string("name", s.name);
    s.duration_s = r.number("duration_s");
    s.plant_dt_s = r.number("plant_dt_s", s.plant_dt_s);
    const double seed = r.number("seed", 0.0);
    if (seed < 0.0 || seed != std::floor(seed)) {
        throw ConfigError("seed must be a non-negative integer");
    }
    s.seed = static_cast<std::uint64_t>(seed);

    if (r.has("motor")) {
        s.motor = parse_motor(r.at("motor"));
    }
    if (r.has("controller")) {
        s.controller = parse_controller(r.at("controller"));
    }
    if (r.has("modulator")) {
        s.modulator = parse_modulator(r.at("modulator"));
    }
    const double base_mech = s.omega_base_mech();

    if (r.has("speed_reference")) {
        const json& arr = r.at("speed_reference");
        if (!arr.is_array()) {
            throw ConfigError("speed_reference: expected an array");
        }
        std::vector<SpeedProfile::Waypoint> pts;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            ObjectReader w(arr[i], "speed_reference[" + std::to_string(i) + "]");
            SpeedProfile::Waypoint wp;
            wp.t_s = w.number("t_s");
            wp.omega_m = read_speed(w, base_mech, 0.0);
            const std::string shape = w.string("shape", "step");
            if (shape == "ramp") {
                wp.shape = SpeedProfile::Shape::ramp;
            } else if (shape != "step") {
                throw ConfigError(w.where() + ".shape: expected 'step' or 'ramp'");
            }
            w.finish();
            pts.push_back(wp);
        }
        s.speed = SpeedProfile(std::move(pts));
    }

    if (r.has("load")) {
        const json& arr = r.at("load");
        if (!arr.is_array()) {
            throw ConfigError("load: expected an array");
        }
        std::vector<LoadProfile::Segment> segs;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            ObjectReader w(arr[i], "load[" + std::to_string(i) + "]");
            LoadProfile::Segment seg;
            seg.t_start_s = w.number("t_s");
            seg.load.torque_nm = w.number("torque_nm", 0.0);
            seg.load.torque_per_rad_s = w.number("torque_nm_per_rad_s", 0.0);
            w.finish();
            segs.push_back(seg);
        }
        s.load = LoadProfile(std::move(segs));
    }

    if (r.has("initial_state")) {
        ObjectReader w(r.at("initial_state"), "initial_state");
        s.initial.i_d = w.number("i_d_a", 0.0);
        s.initial.i_q = w.number("i_q_a", 0.0);
        s.initial.omega_m = read_speed(w, base_mech, 0.0);
        const double theta = w.number("theta_e_rad", 0.0);
        if (!std::isfinite(theta)) {
            throw ConfigError("initial_state.theta_e_rad must be finite");
        }
        s.initial.theta_e = normalize_angle(theta);
        w.finish();
    }

    if (r.has("measurement_noise")) {
        ObjectReader w(r.at("measurement_noise"), "measurement_noise");
        s.current_noise_std_a = w.number("current_std_a", 0.0);
        w.finish();
    }

    if (r.has("outputs")) {
        ObjectReader w(r.at("outputs"), "outputs");
        if (w.has("signals")) {
            const json& arr = w.at("signals");
            if (!arr.is_array()) {
                throw ConfigError("outputs.signals: expected an array of names");
            }
            for (const auto& v : arr) {
                if (!v.is_string()) {
                    throw ConfigError("outputs.signals: expected an array of names");
                }
                s.signals.push_back(v.get<std::string>());
            }
        }
        w.finish();
    }
    if (s.signals.empty()) {
        s.signals = {"omega_ref", "omega_m", "i_d", "i_q", "id_ref", "iq_ref",
                     "i_a",       "i_b",     "i_c", "v_d_cmd", "v_q_cmd", "torque"};
    }

    if (r.has("analysis")) {
        ObjectReader w(r.at("analysis"), "analysis");
        s.analysis.thd_signal = w.string("thd_signal", s.analysis.thd_signal);
        s.analysis.thd_max_order =
            as_int(w.number("thd_max_order", s.analysis.thd_max_order), "analysis.thd_max_order");
        s.analysis.thd_periods =
            as_int(w.number("thd_periods", s.analysis.thd_periods), "analysis.thd_periods");
        s.analysis.settle_s = w.number("settle_s", s.analysis.settle_s);
        s.analysis.envelope_points = as_int(
            w.number("envelope_points", s.analysis.envelope_points), "analysis.envelope_points");
        w.finish();
    }
    r.finish();
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scenario file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

}  // namespace focsim
