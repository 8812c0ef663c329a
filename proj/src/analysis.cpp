#include "focsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "focsim/errors.hpp"
#include "focsim/golden_section.hpp"

namespace focsim {

void Waveform::validate() const {
    if (!(dt > 0.0)) {
        throw InvalidInput("waveform '" + name + "': dt must be positive");
    }
    if (samples.size() < 2) {
        throw InsufficientData("waveform '" + name + "': needs at least 2 samples");
    }
}

double Spectrum::magnitude(int order) const {
    if (order < 0 || order >= static_cast<int>(magnitudes.size())) {
        return 0.0;
    }
    return magnitudes[order];
}

double Spectrum::mean_square() const {
    double ms = 0.0;
    for (std::size_t n = 0; n < magnitudes.size(); ++n) {
        const double m = magnitudes[n];
        if (n == 0 || static_cast<int>(n) == nyquist_order) {
            ms += m * m;
        } else {
            ms += 0.5 * m * m;
        }
    }
    return ms;
}

Spectrum spectrum(const Waveform& w, double fundamental_hz, int max_order, int periods) {
    w.validate();
    if (!(fundamental_hz > 0.0)) {
        throw InvalidInput("spectrum: fundamental must be positive");
    }
    const double samples_per_period = 1.0 / (fundamental_hz * w.dt);
    const auto total = static_cast<double>(w.samples.size());
    int available = static_cast<int>(std::floor(total / samples_per_period + 1e-9));
    if (available < kMinSpectrumPeriods) {
        throw InsufficientData("waveform '" + w.name + "' spans fewer than " +
                               std::to_string(kMinSpectrumPeriods) + " fundamental periods");
    }
    if (periods > 0) {
        if (periods < kMinSpectrumPeriods || periods > available) {
            throw InsufficientData("requested period count not available in '" + w.name + "'");
        }
        available = periods;
    }

    const auto window =
        std::min(w.samples.size(),
                 static_cast<std::size_t>(std::llround(available * samples_per_period)));
    const std::span<const double> x(w.samples.data() + (w.samples.size() - window), window);
    const auto n_win = static_cast<double>(window);

    const double exact_p = n_win / available;
    const bool integer_period = std::abs(exact_p - std::round(exact_p)) < 1e-9;
    const auto period_samples = static_cast<long long>(std::llround(exact_p));

    int top = static_cast<int>(std::floor(exact_p / 2.0 + 1e-9));
    int nyquist = 0;
    if (integer_period && period_samples % 2 == 0) {
        nyquist = static_cast<int>(period_samples / 2);
    }
    if (max_order > 0 && max_order < top) {
        top = max_order;
        nyquist = 0;
    }

    Spectrum s;
    s.fundamental_freq = fundamental_hz;
    s.periods = available;
    s.window = window;
    s.nyquist_order = nyquist;
    s.magnitudes.assign(static_cast<std::size_t>(top) + 1, 0.0);

    if (integer_period) {
        // Sum the periods sample-wise; harmonic orders see the same sums.
        const auto period = static_cast<std::size_t>(period_samples);
        std::vector<double> folded(period, 0.0);
        for (std::size_t k = 0; k < window; ++k) {
            folded[k % period] += x[k];
        }
        std::vector<double> cos_table(period);
        std::vector<double> sin_table(period);
        for (std::size_t r = 0; r < period; ++r) {
            const double angle =
                2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(period);
            cos_table[r] = std::cos(angle);
            sin_table[r] = std::sin(angle);
        }
        for (int n = 0; n <= top; ++n) {
            double re = 0.0;
            double im = 0.0;
            std::size_t idx = 0;
            for (std::size_t r = 0; r < period; ++r) {
                re += folded[r] * cos_table[idx];
                im -= folded[r] * sin_table[idx];
                idx += static_cast<std::size_t>(n);
                idx %= period;
            }
            const double mag = std::hypot(re, im) / n_win;
            s.magnitudes[n] = (n == 0 || n == nyquist) ? mag : 2.0 * mag;
        }
        return s;
    }

    for (int n = 0; n <= top; ++n) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t k = 0; k < window; ++k) {
            const double angle = 2.0 * std::numbers::pi * n * static_cast<double>(k) / exact_p;
            re += x[k] * std::cos(angle);
            im -= x[k] * std::sin(angle);
        }
        const double mag = std::hypot(re, im) / n_win;
        s.magnitudes[n] = (n == 0 || n == nyquist) ? mag : 2.0 * mag;
    }
    return s;
}

double thd(const Spectrum& s, int max_order) {
    const double fundamental = s.magnitude(1);
    // A fundamental at rounding level relative to the rest of the record
    // counts as zero.
    const double largest =
        s.magnitudes.empty() ? 0.0 : *std::max_element(s.magnitudes.begin(), s.magnitudes.end());
    if (!(fundamental > 1e-12 * largest)) {
        throw UndefinedThd("THD undefined: fundamental magnitude is zero");
    }
    double sum = 0.0;
    const int top = std::min<int>(max_order, static_cast<int>(s.magnitudes.size()) - 1);
    for (int n = 2; n <= top; ++n) {
        sum += s.magnitudes[n] * s.magnitudes[n];
    }
    return std::sqrt(sum) / fundamental;
}

namespace {

// Linear interpolation of the first time the signal crosses `level` moving
// in the direction of `sign`, searching from index `from`.
std::optional<double> first_crossing(const Waveform& w, std::size_t from, double level,
                                     double sign) {
    for (std::size_t k = from; k < w.samples.size(); ++k) {
        if (sign * (w.samples[k] - level) >= 0.0) {
            if (k == from) {
                return k * w.dt;
            }
            const double y0 = w.samples[k - 1];
            const double y1 = w.samples[k];
            const double frac = (level - y0) / (y1 - y0);
            return (static_cast<double>(k - 1) + frac) * w.dt;
        }
    }
    return std::nullopt;
}

}  // namespace

TrackingMetrics tracking_metrics(const Waveform& ref, const Waveform& actual) {
    ref.validate();
    actual.validate();
    if (ref.samples.size() != actual.samples.size() || ref.dt != actual.dt) {
        throw InvalidInput("tracking_metrics: reference and response sampled differently");
    }
    TrackingMetrics m;
    const double initial = ref.samples.front();
    const double final_value = ref.samples.back();
    const double step = final_value - initial;
    if (std::abs(step) <= 1e-12 * std::max(1.0, std::abs(final_value))) {
        return m;
    }
    m.applicable = true;
    const double sign = step > 0.0 ? 1.0 : -1.0;

    std::size_t k0 = 0;
    while (k0 < ref.samples.size() && ref.samples[k0] == initial) {
        ++k0;
    }
    if (k0 > 0) {
        --k0;  // last sample before the reference moves
    }
    const double t0 = k0 * ref.dt;

    const auto t10 = first_crossing(actual, k0, initial + 0.1 * step, sign);
    const auto t90 = first_crossing(actual, k0, initial + 0.9 * step, sign);
    if (t10 && t90) {
        m.rise_time = *t90 - *t10;
    }

    double peak = actual.samples[k0];
    for (std::size_t k = k0; k < actual.samples.size(); ++k) {
        peak = sign > 0.0 ? std::max(peak, actual.samples[k]) : std::min(peak, actual.samples[k]);
    }
    m.overshoot_pct = std::max(0.0, sign * (peak - final_value) / std::abs(step) * 100.0);

    const double band = 0.02 * std::abs(step);
    std::size_t last_outside = k0;
    bool any_outside = false;
    for (std::size_t k = k0; k < actual.samples.size(); ++k) {
        if (std::abs(actual.samples[k] - final_value) > band) {
            last_outside = k;
            any_outside = true;
        }
    }
    m.settling_time = any_outside ? (static_cast<double>(last_outside + 1) * ref.dt - t0) : 0.0;

    const std::size_t tail = std::max<std::size_t>(1, ref.samples.size() / 10);
    double err = 0.0;
    for (std::size_t k = ref.samples.size() - tail; k < ref.samples.size(); ++k) {
        err += std::abs(ref.samples[k] - actual.samples[k]);
    }
    m.steady_state_error = err / static_cast<double>(tail);
    m.steady_state_error_rel =
        std::abs(final_value) > 0.0 ? m.steady_state_error / std::abs(final_value) : 0.0;
    return m;
}

namespace {

// Largest current magnitude along angle gamma that satisfies both limits,
// or nullopt if none does.
std::optional<double> max_feasible_current(const MotorParams& p, double gamma, double rho) {
    const double s = std::sin(gamma);
    const double c = std::cos(gamma);
    const double a = p.l_d * p.l_d * s * s + p.l_q * p.l_q * c * c;
    const double b = p.psi_m * p.l_d * s;
    const double cc = p.psi_m * p.psi_m - rho * rho;
    const double disc = b * b - a * cc;
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double root = std::sqrt(disc);
    const double lower = (b - root) / a;
    const double upper = (b + root) / a;
    if (cc > 0.0 && lower > p.i_max) {
        return std::nullopt;
    }
    if (upper < 0.0) {
        return std::nullopt;
    }
    return std::min(p.i_max, upper);
}

}  // namespace

std::vector<EnvelopePoint> envelope_sweep(const MotorParams& p, std::span<const double> speeds) {
    p.validate();
    constexpr double kQuarter = std::numbers::pi / 2.0;
    std::vector<EnvelopePoint> out;
    out.reserve(speeds.size());
    double prev = 0.0;
    for (const double omega_m : speeds) {
        if (!(omega_m > 0.0) || !std::isfinite(omega_m)) {
            throw InvalidInput("envelope_sweep: speeds must be positive");
        }
        if (omega_m < prev) {
            throw InvalidInput("envelope_sweep: speeds must be sorted");
        }
        prev = omega_m;

        const double rho = p.v_max / (p.pole_pairs * omega_m);
        const auto torque_at = [&](double gamma) {
            const auto current = max_feasible_current(p, gamma, rho);
            if (!current) {
                return 0.0;
            }
            MotorState st;
            st.i_d = -*current * std::sin(gamma);
            st.i_q = *current * std::cos(gamma);
            return electromagnetic_torque(st, p);
        };

        EnvelopePoint pt;
        pt.omega_m = omega_m;
        if (!max_feasible_current(p, kQuarter, rho)) {
            pt.feasible = false;
            out.push_back(pt);
            continue;
        }
        // Feasibility only improves as the current turns toward -d.
        double lo = 0.0;
        if (!max_feasible_current(p, 0.0, rho)) {
            double hi = kQuarter;
            while (hi - lo > kEnvelopeAngleTolerance * 1e-3) {
                const double mid = 0.5 * (lo + hi);
                (max_feasible_current(p, mid, rho) ? hi : lo) = mid;
            }
            lo = hi;
        }
        const double gamma = golden_section_max(torque_at, lo, kQuarter, kEnvelopeAngleTolerance);
        const double current = max_feasible_current(p, gamma, rho).value_or(0.0);
        pt.i_d = -current * std::sin(gamma);
        pt.i_q = current * std::cos(gamma);
        pt.max_torque = std::max(0.0, torque_at(gamma));
        pt.power = pt.max_torque * omega_m;
        out.push_back(pt);
    }
    return out;
}

}  // namespace focsim
