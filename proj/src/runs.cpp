#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "focsim/csv.hpp"
#include "focsim/errors.hpp"
#include "focsim/simulation.hpp"
#include "json.hpp"

namespace focsim {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

std::vector<Waveform> selected(const Scenario& s, const SimulationResult& r) {
    std::vector<Waveform> out;
    for (const auto& name : s.signals) {
        out.push_back(r.signal(name));
    }
    return out;
}

bool has_signal(const Scenario& s, const std::string& name) {
    return std::find(s.signals.begin(), s.signals.end(), name) != s.signals.end();
}

// One gnuplot script per figure; only signals present in the CSV are drawn.
std::vector<fs::path> write_plot_scripts(const Scenario& s, const fs::path& dir,
                                         const std::string& stem) {
    struct Figure {
        std::string suffix;
        std::string ylabel;
        std::vector<std::string> signals;
    };
    const std::vector<Figure> figures{
        {"speed", "speed (rad/s)", {"omega_ref", "omega_m"}},
        {"torque", "torque (N m)", {"torque", "load_torque"}},
        {"currents_dq", "current (A)", {"id_ref", "i_d", "iq_ref", "i_q"}},
        {"currents_abc", "current (A)", {"i_a", "i_b", "i_c"}},
        {"voltages_dq", "voltage (V)", {"v_d_cmd", "v_q_cmd", "v_cmd_mag"}},
    };
    std::vector<fs::path> paths;
    for (const auto& fig : figures) {
        std::vector<std::string> present;
        for (const auto& sig : fig.signals) {
            if (has_signal(s, sig)) {
                present.push_back(sig);
            }
        }
        if (present.empty()) {
            continue;
        }
        const fs::path path = dir / (stem + "_" + fig.suffix + ".gp");
        std::ofstream out(path);
        out << "set datafile separator ','\n"
            << "set terminal pngcairo size 1000,600\n"
            << "set output '" << stem << "_" << fig.suffix << ".png'\n"
            << "set xlabel 'time (s)'\n"
            << "set ylabel '" << fig.ylabel << "'\n"
            << "set grid\n"
            << "plot ";
        for (std::size_t i = 0; i < present.size(); ++i) {
            out << (i ? ", \\\n     " : "") << "'" << stem << ".csv' using \"time_s\":\""
                << present[i] << "\" with lines title '" << present[i] << "'";
        }
        out << '\n';
        paths.push_back(path);
    }
    return paths;
}

ordered_json to_json(const TrackingMetrics& m) {
    return {{"applicable", m.applicable},
            {"rise_time_s", m.rise_time},
            {"overshoot_pct", m.overshoot_pct},
            {"settling_time_s", m.settling_time},
            {"steady_state_error_rad_s", m.steady_state_error},
            {"steady_state_error_rel", m.steady_state_error_rel}};
}

ordered_json to_json(const EnergyBalance& e) {
    return {{"input_j", e.input},
            {"copper_j", e.copper},
            {"mechanical_j", e.mechanical},
            {"magnetic_delta_j", e.magnetic_delta},
            {"residual_rel", e.residual},
            {"within_limit", e.residual < kEnergyResidualLimit}};
}

void write_report(RunReport& report, const fs::path& path) {
    ordered_json j;
    j["scenario"] = report.scenario;
    j["seed"] = report.seed;
    ordered_json files = ordered_json::array();
    for (const auto& p : report.csv_paths) files.push_back(p.string());
    j["csv"] = files;
    ordered_json plots = ordered_json::array();
    for (const auto& p : report.plot_paths) plots.push_back(p.string());
    j["plots"] = plots;
    if (report.speed_metrics) j["speed_tracking"] = to_json(*report.speed_metrics);
    if (report.energy) j["energy_balance"] = to_json(*report.energy);
    if (report.hysteresis_band_a) j["hysteresis_band_a"] = *report.hysteresis_band_a;
    ordered_json thd_rows = ordered_json::array();
    for (const auto& e : report.thd_table) {
        thd_rows.push_back({{"label", e.label},
                            {"signal", e.signal},
                            {"fundamental_hz", e.fundamental_hz},
                            {"switching_freq_hz", e.switching_freq_hz},
                            {"thd", e.thd},
                            {"magnitudes", e.magnitudes}});
    }
    j["thd"] = thd_rows;
    if (!report.envelope.empty()) {
        j["envelope_base_speed_rad_s"] = report.envelope_base_speed;
        j["envelope_points"] = report.envelope.size();
    }
    j["warnings"] = report.warnings;

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
    report.report_path = path;
}

void emit_waveforms(const Scenario& s, const SimulationResult& r, const fs::path& dir,
                    const std::string& stem, RunReport& report) {
    const auto waves = selected(s, r);
    const fs::path csv = dir / (stem + ".csv");
    write_waveforms_csv(csv, waves);
    report.csv_paths.push_back(csv);
    for (auto& p : write_plot_scripts(s, dir, stem)) {
        report.plot_paths.push_back(std::move(p));
    }
}

}  // namespace

std::optional<ThdEntry> thd_entry(const Scenario& s, const SimulationResult& r,
                                  const std::string& label, std::vector<std::string>& warnings) {
    const double omega_e = std::abs(s.speed.final_value()) * s.motor.pole_pairs;
    if (omega_e == 0.0) {
        warnings.push_back(label + ": no THD, final speed reference is zero");
        return std::nullopt;
    }
    const Waveform& full = r.signal(s.analysis.thd_signal);
    const auto skip = std::min(full.samples.size(),
                               static_cast<std::size_t>(std::ceil(s.analysis.settle_s / full.dt)));
    Waveform tail{full.name, full.dt,
                  std::vector<double>(full.samples.begin() + static_cast<long>(skip),
                                      full.samples.end())};
    ThdEntry e;
    e.label = label;
    e.signal = full.name;
    e.fundamental_hz = omega_e / (2.0 * std::numbers::pi);
    e.switching_freq_hz = r.switching_freq_hz;
    try {
        const Spectrum spec =
            spectrum(tail, e.fundamental_hz, s.analysis.thd_max_order, s.analysis.thd_periods);
        e.thd = thd(spec, s.analysis.thd_max_order);
        e.magnitudes = spec.magnitudes;
        e.magnitudes.resize(static_cast<std::size_t>(s.analysis.thd_max_order) + 1, 0.0);
    } catch (const InsufficientData& ex) {
        warnings.push_back(label + ": no THD, " + ex.what());
        return std::nullopt;
    } catch (const UndefinedThd& ex) {
        warnings.push_back(label + ": no THD, " + ex.what());
        return std::nullopt;
    }
    return e;
}

RunReport run_scenario(const Scenario& s, const fs::path& out_dir) {
    s.validate();
    const SimulationResult r = simulate(s);
    ensure_dir(out_dir);

    RunReport report;
    report.scenario = s.name;
    report.seed = s.seed;
    const std::string stem = s.name + "_" + to_string(s.modulator.kind);
    emit_waveforms(s, r, out_dir, stem, report);

    report.speed_metrics = tracking_metrics(r.signal("omega_ref"), r.signal("omega_m"));
    report.energy = r.energy;
    if (auto e = thd_entry(s, r, to_string(s.modulator.kind), report.warnings)) {
        report.thd_table.push_back(std::move(*e));
    }
    if (r.overmodulated_periods > 0) {
        report.warnings.push_back(std::to_string(r.overmodulated_periods) +
                                  " carrier periods were overmodulated");
    }
    write_report(report, out_dir / (s.name + "_report.json"));
    return report;
}

BandSearchResult match_hysteresis_band(const Scenario& s, double target_hz) {
    if (!(target_hz > 0.0)) {
        throw ConfigError("target switching frequency must be positive");
    }
    Scenario h = s;
    h.modulator.kind = ModulatorKind::hysteresis;

    double lo = 1e-3;
    double hi = 0.5 * s.motor.i_max;
    std::optional<BandSearchResult> best;
    for (int iter = 0; iter < 24; ++iter) {
        const double band = std::sqrt(lo * hi);
        h.modulator.hysteresis_band_a = band;
        SimulationResult r = simulate(h);
        const double f = r.switching_freq_hz;
        const double rel = std::abs(f - target_hz) / target_hz;
        if (!best || rel < std::abs(best->switching_freq_hz - target_hz) / target_hz) {
            best = BandSearchResult{band, f, rel <= 0.10, std::move(r)};
        }
        if (rel <= 0.02) {
            break;
        }
        (f > target_hz ? lo : hi) = band;
    }
    return std::move(*best);
}

RunReport run_comparison(const Scenario& s, const fs::path& out_dir) {
    s.validate();
    ensure_dir(out_dir);
    RunReport report;
    report.scenario = s.name;
    report.seed = s.seed;

    Scenario svm = s;
    svm.modulator.kind = ModulatorKind::svm;
    const SimulationResult r_svm = simulate(svm);
    emit_waveforms(svm, r_svm, out_dir, s.name + "_svm", report);

    BandSearchResult hyst = match_hysteresis_band(s, r_svm.switching_freq_hz);
    Scenario h = s;
    h.modulator.kind = ModulatorKind::hysteresis;
    h.modulator.hysteresis_band_a = hyst.band_a;
    emit_waveforms(h, hyst.run, out_dir, s.name + "_hysteresis", report);
    report.hysteresis_band_a = hyst.band_a;
    if (!hyst.matched) {
        report.warnings.push_back("hysteresis band search missed the SVM switching frequency by "
                                  "more than 10% (" +
                                  std::to_string(hyst.switching_freq_hz) + " Hz vs " +
                                  std::to_string(r_svm.switching_freq_hz) + " Hz)");
    }

    if (auto e = thd_entry(svm, r_svm, "svm", report.warnings)) {
        report.thd_table.push_back(std::move(*e));
    }
    if (auto e = thd_entry(h, hyst.run, "hysteresis", report.warnings)) {
        report.thd_table.push_back(std::move(*e));
    }
    report.speed_metrics = tracking_metrics(r_svm.signal("omega_ref"), r_svm.signal("omega_m"));
    report.energy = r_svm.energy;
    if (hyst.run.energy.residual > r_svm.energy.residual) {
        report.energy = hyst.run.energy;
    }

    // Side-by-side spectra.
    if (report.thd_table.size() == 2) {
        const fs::path csv = out_dir / (s.name + "_thd_compare.csv");
        std::ofstream out(csv, std::ios::binary);
        out << "order,svm,hysteresis\n";
        const auto& a = report.thd_table[0].magnitudes;
        const auto& b = report.thd_table[1].magnitudes;
        for (std::size_t n = 0; n < std::min(a.size(), b.size()); ++n) {
            out << n << ',' << format_double(a[n]) << ',' << format_double(b[n]) << '\n';
        }
        report.csv_paths.push_back(csv);
    }
    write_report(report, out_dir / (s.name + "_compare_report.json"));
    return report;
}

RunReport run_envelope(const Scenario& s, int n_points, const fs::path& out_dir) {
    s.validate();
    if (n_points < 2) {
        throw ConfigError("envelope needs at least 2 points");
    }
    const double base = s.omega_base_mech();
    std::vector<double> speeds(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        speeds[i] = base * (0.1 + 2.9 * static_cast<double>(i) / (n_points - 1));
    }

    RunReport report;
    report.scenario = s.name;
    report.seed = s.seed;
    report.envelope = envelope_sweep(s.motor, speeds);
    report.envelope_base_speed = base;
    for (const auto& pt : report.envelope) {
        if (!pt.feasible) {
            report.warnings.push_back("no feasible operating point at " +
                                      format_double(pt.omega_m) + " rad/s");
        }
    }

    ensure_dir(out_dir);
    const fs::path csv = out_dir / (s.name + "_envelope.csv");
    {
        std::ofstream out(csv, std::ios::binary);
        if (!out) {
            throw ConfigError("cannot write " + csv.string());
        }
        out << "omega_m_rad_s,max_torque_nm,power_w,i_d_a,i_q_a,feasible\n";
        for (const auto& pt : report.envelope) {
            out << format_double(pt.omega_m) << ',' << format_double(pt.max_torque) << ','
                << format_double(pt.power) << ',' << format_double(pt.i_d) << ','
                << format_double(pt.i_q) << ',' << (pt.feasible ? 1 : 0) << '\n';
        }
    }
    report.csv_paths.push_back(csv);

    const fs::path gp = out_dir / (s.name + "_envelope.gp");
    {
        std::ofstream out(gp);
        out << "set datafile separator ','\n"
            << "set terminal pngcairo size 1000,800\n"
            << "set output '" << s.name << "_envelope.png'\n"
            << "set multiplot layout 2,1\n"
            << "set grid\n"
            << "set xlabel 'speed (rad/s)'\n"
            << "set arrow from " << format_double(base) << ", graph 0 to "
            << format_double(base) << ", graph 1 nohead dashtype 2\n"
            << "set ylabel 'max torque (N m)'\n"
            << "plot '" << s.name << "_envelope.csv' using 1:2 with lines title 'torque'\n"
            << "set ylabel 'power (W)'\n"
            << "plot '" << s.name << "_envelope.csv' using 1:3 with lines title 'power'\n"
            << "unset multiplot\n";
    }
    report.plot_paths.push_back(gp);
    write_report(report, out_dir / (s.name + "_envelope_report.json"));
    return report;
}

}  // namespace focsim
