#pragma once

#include <cstdint>
#include <filesystem>

namespace rainpipe::synth {

// Deterministic generator for a weather-observation CSV with the standard
// 24-column schema: seasonal per-station climate, correlated humidity and
// cloud fields, a RISK_MM column that encodes the label, and per-column
// missing rates matching the well-known public file. Exactly n_yes rows
// get RainTomorrow = Yes. Useful for demos, benchmarks and the acceptance
// suite when the real file is not on disk.
struct WeatherSynthConfig {
    std::size_t n_rows = 142193;
    std::size_t n_yes = 31877;
    std::uint64_t seed = 20080101;
};

void write_weather_csv(const std::filesystem::path& path, const WeatherSynthConfig& config);

} // namespace rainpipe::synth
