#pragma once

// Scenario description and its JSON loader. Every key carries its unit in
// the name (omega_m_rad_s, duration_s, ...); unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "focsim/controller.hpp"
#include "focsim/motor_model.hpp"

namespace focsim {

enum class ModulatorKind { svm, hysteresis };

std::string to_string(ModulatorKind k);

struct ModulatorConfig {
    ModulatorKind kind = ModulatorKind::svm;
    double carrier_hz = 10e3;
    double v_dc = 0.0;  // 0 selects sqrt(3) * v_max, the smallest link that reaches v_max
    double hysteresis_band_a = 0.5;
};

struct ControllerConfig {
    double rate_hz = 10e3;
    double current_bandwidth_rad_s = 2000.0;
    double speed_bandwidth_rad_s = 200.0;
    double v_margin = kDefaultVoltageMargin;
    std::optional<GainSet> gains;  // overrides the bandwidth tuning when set
};

// Piecewise speed reference. Each waypoint is reached either by jumping at
// its time (step) or linearly from the previous waypoint (ramp).
class SpeedProfile {
public:
    enum class Shape { step, ramp };
    struct Waypoint {
        double t_s = 0.0;
        double omega_m = 0.0;  // rad/s
        Shape shape = Shape::step;
    };

    SpeedProfile() = default;
    explicit SpeedProfile(std::vector<Waypoint> points);

    double at(double t) const;
    double final_value() const;
    const std::vector<Waypoint>& waypoints() const { return points_; }

private:
    std::vector<Waypoint> points_;
};

struct AnalysisConfig {
    std::string thd_signal = "i_a";
    int thd_max_order = 50;
    int thd_periods = 0;  // 0: every whole period after settle_s
    double settle_s = 0.0;  // start of the steady-state window for THD
    int envelope_points = 0;
};

struct Scenario {
    std::string name = "scenario";
    MotorParams motor = default_motor_params();
    ControllerConfig controller;
    ModulatorConfig modulator;
    SpeedProfile speed;
    LoadProfile load;
    MotorState initial;
    double duration_s = 0.0;
    double plant_dt_s = 1e-5;
    std::uint64_t seed = 0;
    double current_noise_std_a = 0.0;
    std::vector<std::string> signals;
    AnalysisConfig analysis;

    double v_dc() const;
    GainSet gains() const;
    double omega_base_mech() const { return motor.omega_base / motor.pole_pairs; }

    // Throws ConfigError on the first violated rule.
    void validate() const;
};

// Names accepted in Scenario::signals.
const std::vector<std::string>& available_signals();

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace focsim
