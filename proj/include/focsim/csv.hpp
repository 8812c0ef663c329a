#pragma once

// Waveform CSV files: header `time_s,<signal>...`, one row per sample,
// numbers printed with 17 significant digits so doubles round-trip exactly.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "focsim/analysis.hpp"

namespace focsim {

std::string format_double(double v);

// All waveforms must share dt and length.
void write_waveforms_csv(const std::filesystem::path& path, std::span<const Waveform> waves);

std::vector<Waveform> read_waveforms_csv(const std::filesystem::path& path);

}  // namespace focsim
