#include "focsim/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "focsim/errors.hpp"

namespace focsim {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (res.ec != std::errc{}) {
        throw InvalidInput("cannot format value");
    }
    return {buf, res.ptr};
}

void write_waveforms_csv(const std::filesystem::path& path, std::span<const Waveform> waves) {
    if (waves.empty()) {
        throw InvalidInput("no waveforms to write");
    }
    const double dt = waves.front().dt;
    const std::size_t n = waves.front().samples.size();
    for (const auto& w : waves) {
        if (w.dt != dt || w.samples.size() != n) {
            throw InvalidInput("waveform '" + w.name + "' does not share the common time base");
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    std::string line = "time_s";
    for (const auto& w : waves) {
        line += ',';
        line += w.name;
    }
    out << line << '\n';
    for (std::size_t k = 0; k < n; ++k) {
        line = format_double(static_cast<double>(k) * dt);
        for (const auto& w : waves) {
            line += ',';
            line += format_double(w.samples[k]);
        }
        out << line << '\n';
    }
    if (!out) {
        throw ConfigError("failed while writing " + path.string());
    }
}

std::vector<Waveform> read_waveforms_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw InsufficientData(path.string() + " is empty");
    }
    std::vector<std::string> names;
    {
        std::stringstream header(line);
        std::string cell;
        while (std::getline(header, cell, ',')) {
            names.push_back(cell);
        }
    }
    if (names.size() < 2 || names.front() != "time_s") {
        throw ConfigError(path.string() + ": header must start with time_s and name a signal");
    }

    std::vector<double> time;
    std::vector<Waveform> waves(names.size() - 1);
    for (std::size_t i = 1; i < names.size(); ++i) {
        waves[i - 1].name = names[i];
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (std::size_t col = 0; col < names.size(); ++col) {
            double v = 0.0;
            const auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc{}) {
                throw ConfigError(path.string() + ": malformed number in column " + names[col]);
            }
            (col == 0 ? time : waves[col - 1].samples).push_back(v);
            p = res.ptr;
            if (col + 1 < names.size()) {
                if (p == end || *p != ',') {
                    throw ConfigError(path.string() + ": short row");
                }
                ++p;
            }
        }
    }
    if (time.size() < 2) {
        throw InsufficientData(path.string() + ": fewer than two rows");
    }
    const double dt = time[1] - time[0];
    for (auto& w : waves) {
        w.dt = dt;
    }
    return waves;
}

}  // namespace focsim
