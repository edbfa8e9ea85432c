#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netcast {

enum class SynthKind : std::uint8_t { trend, trend_seasonal, trend_outburst, trend_seasonal_outburst, discrete };

std::string_view to_string(SynthKind k);
std::optional<SynthKind> parse_synth_kind(std::string_view s);

struct SynthParams {
    SynthKind kind = SynthKind::trend;
    std::int64_t length = 5040;   // five weeks at 10 minutes
    std::int64_t step_seconds = 600;
    std::int64_t start_time = 0;
    std::uint64_t seed = 1;
    double level = 50.0;
    double slope = 0.001;
    double noise = 1.0;
    int period = 144;             // seasonal period in steps
    double amplitude = 10.0;
    int outburst_period = 144;
    int outburst_offset = 36;
    double outburst_height = 40.0;
    int states = 50;              // discrete only
};

/// Deterministic for a given parameter set. Discrete series are a lazy random
/// walk on 1..states.
[[nodiscard]] std::vector<double> synth_values(const SynthParams& p);

/// Ingest-format text: a '#' header recording kind and seed, then one
/// "series_id,timestamp,value" line per step.
[[nodiscard]] std::string synth_text(const SynthParams& p, std::string_view series_id);

} // namespace netcast
