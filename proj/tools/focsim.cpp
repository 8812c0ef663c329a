// focsim command-line front end.
//
//   focsim simulate <scenario.json> [--out DIR] [--strict]
//   focsim compare  <scenario.json> [--out DIR]
//   focsim envelope <scenario.json> --points N [--out DIR]
//   focsim validate <scenario.json>
//
// Output goes to --out, else $FOCSIM_OUT_DIR, else ./focsim_out.
// Exit codes: 0 ok, 1 validation error, 2 divergence, 3 strict-mode failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "focsim/csv.hpp"
#include "focsim/errors.hpp"
#include "focsim/scenario.hpp"
#include "focsim/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitDivergence = 2;
constexpr int kExitStrict = 3;

std::filesystem::path output_dir(const std::string& flag) {
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv("FOCSIM_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "focsim_out";
}

void print_summary(const focsim::RunReport& r) {
    using focsim::format_double;
    std::cout << "scenario: " << r.scenario << " (seed " << r.seed << ")\n";
    for (const auto& p : r.csv_paths) std::cout << "  csv:    " << p.string() << '\n';
    for (const auto& p : r.plot_paths) std::cout << "  plot:   " << p.string() << '\n';
    if (!r.report_path.empty()) std::cout << "  report: " << r.report_path.string() << '\n';
    if (r.speed_metrics && r.speed_metrics->applicable) {
        const auto& m = *r.speed_metrics;
        std::cout << "  speed: rise " << format_double(m.rise_time) << " s, overshoot "
                  << format_double(m.overshoot_pct) << " %, settling "
                  << format_double(m.settling_time) << " s, steady-state error "
                  << format_double(100.0 * m.steady_state_error_rel) << " %\n";
    }
    if (r.energy) {
        std::cout << "  energy balance residual: " << format_double(100.0 * r.energy->residual)
                  << " %\n";
    }
    if (r.hysteresis_band_a) {
        std::cout << "  hysteresis band: " << format_double(*r.hysteresis_band_a) << " A\n";
    }
    for (const auto& e : r.thd_table) {
        std::cout << "  THD[" << e.label << "] " << e.signal << " @ "
                  << format_double(e.fundamental_hz) << " Hz, f_sw "
                  << format_double(e.switching_freq_hz) << " Hz: " << format_double(e.thd)
                  << '\n';
    }
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Field-oriented PM motor drive simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_flag;
    bool strict = false;
    int points = 0;

    auto* simulate = app.add_subcommand("simulate", "run a scenario and write waveforms");
    simulate->add_option("scenario", scenario_path, "scenario JSON file")->required();
    simulate->add_option("--out", out_flag, "output directory");
    simulate->add_flag("--strict", strict, "fail (exit 3) if the energy balance is off by > 0.5%");

    auto* compare = app.add_subcommand("compare", "SVM vs hysteresis at matched switching rate");
    compare->add_option("scenario", scenario_path, "scenario JSON file")->required();
    compare->add_option("--out", out_flag, "output directory");

    auto* envelope = app.add_subcommand("envelope", "torque/power-speed envelope sweep");
    envelope->add_option("scenario", scenario_path, "scenario JSON file")->required();
    envelope->add_option("--points", points, "number of speed points (>= 2)")->required();
    envelope->add_option("--out", out_flag, "output directory");

    auto* validate = app.add_subcommand("validate", "check a scenario file without running it");
    validate->add_option("scenario", scenario_path, "scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        const focsim::Scenario s = focsim::load_scenario(scenario_path);
        if (validate->parsed()) {
            std::cout << "scenario '" << s.name << "' is valid\n";
            return kExitOk;
        }
        const auto dir = output_dir(out_flag);
        focsim::RunReport report;
        if (simulate->parsed()) {
            report = focsim::run_scenario(s, dir);
        } else if (compare->parsed()) {
            report = focsim::run_comparison(s, dir);
        } else {
            report = focsim::run_envelope(s, points, dir);
        }
        print_summary(report);
        if (strict && !report.energy_ok()) {
            std::cerr << "strict: energy-balance residual exceeds 0.5%\n";
            return kExitStrict;
        }
        return kExitOk;
    } catch (const focsim::DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const focsim::ConfigError& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return kExitValidation;
    } catch (const focsim::InvalidInput& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return kExitValidation;
    }
}
