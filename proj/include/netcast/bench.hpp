#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netcast {

enum class BenchConfig : std::uint8_t { linear, seasonal, outburst, markov };

std::string_view to_string(BenchConfig c);
std::optional<BenchConfig> parse_bench_config(std::string_view s);

/// Mean per-iteration seconds reported for each configuration in the
/// original stress test.
[[nodiscard]] double reference_mean_seconds(BenchConfig c);

struct BenchReport {
    BenchConfig config = BenchConfig::linear;
    std::int64_t iterations = 0;
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    // Work done, independent of timing: updates, short and long predictions.
    std::int64_t updates = 0;
    std::int64_t short_predictions = 0;
    std::int64_t long_predictions = 0;
};

/// Streams `n` synthetic points through a fresh model of the given
/// configuration. Each timed iteration is one update, a 3-step forecast with
/// intervals and alarm checks, and a 30-step point forecast with the
/// long-term assessment (crossing times, or the stationary distribution for
/// the Markov chain).
[[nodiscard]] BenchReport run_bench(BenchConfig config, std::int64_t n = 15000, std::uint64_t seed = 1);

[[nodiscard]] std::string format_bench(const BenchReport& r);

} // namespace netcast
