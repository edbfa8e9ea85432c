#include "netcast/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>

#include "netcast/engine.hpp"
#include "netcast/synth.hpp"

namespace netcast {

namespace {

constexpr std::pair<BenchConfig, std::string_view> kNames[] = {
    {BenchConfig::linear, "linear"},
    {BenchConfig::seasonal, "seasonal"},
    {BenchConfig::outburst, "outburst"},
    {BenchConfig::markov, "markov"},
};

constexpr int kShortHorizon = 3;
constexpr int kLongHorizon = 30;
constexpr int kSeasonalPeriod = 144;
constexpr int kMarkovStates = 50;

} // namespace

std::string_view to_string(BenchConfig c) {
    for (const auto& [cfg, name] : kNames) {
        if (cfg == c) {
            return name;
        }
    }
    return "?";
}

std::optional<BenchConfig> parse_bench_config(std::string_view s) {
    for (const auto& [cfg, name] : kNames) {
        if (name == s) {
            return cfg;
        }
    }
    return std::nullopt;
}

double reference_mean_seconds(BenchConfig c) {
    switch (c) {
    case BenchConfig::linear:
        return 4.03e-4;
    case BenchConfig::seasonal:
        return 2.50e-2;
    case BenchConfig::outburst:
        return 4.42e-4;
    case BenchConfig::markov:
        return 8.81e-4;
    }
    return 0.0;
}

BenchReport run_bench(BenchConfig config, std::int64_t n, std::uint64_t seed) {
    SynthParams sp;
    sp.length = n;
    sp.seed = seed;
    Blueprint bp;
    Config cfg;
    cfg.horizon = kShortHorizon;
    cfg.stationary_cadence = 1;
    Thresholds th{80.0, 100.0};
    switch (config) {
    case BenchConfig::linear:
        sp.kind = SynthKind::trend;
        break;
    case BenchConfig::seasonal:
        sp.kind = SynthKind::trend_seasonal;
        bp.seasonal_period = kSeasonalPeriod;
        break;
    case BenchConfig::outburst:
        sp.kind = SynthKind::trend_outburst;
        bp.outburst_slots.push_back(OutburstSlot{sp.outburst_period, sp.outburst_offset, 1});
        break;
    case BenchConfig::markov:
        sp.kind = SynthKind::discrete;
        sp.states = kMarkovStates;
        sp.level = 25.0;
        bp.kind = SeriesKind::discrete;
        bp.states = kMarkovStates;
        th = Thresholds{40.0, 45.0};
        break;
    }
    const auto values = synth_values(sp);
    SeriesModel model = SeriesModel::from_blueprint("bench", bp, sp.step_seconds, 0, th, cfg);

    BenchReport r;
    r.config = config;
    r.iterations = n;
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(n));
    IngestEvent ev;
    ev.series_id = "bench";
    [[maybe_unused]] volatile double sink = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        ev.timestamp = i * sp.step_seconds;
        ev.value = values[static_cast<std::size_t>(i)];
        const auto t0 = std::chrono::steady_clock::now();
        // Update, short forecast with alarm checks and long-term assessment.
        const OutputRecord rec = model.step(ev);
        // Long point forecast.
        if (const auto& dlm = model.dlm()) {
            sink = dlm->predict_points(kLongHorizon).back();
        } else {
            sink = model.markov()->predict_k(kLongHorizon).front();
        }
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
        ++r.updates;
        r.short_predictions += rec.forecasts.empty() ? 0 : 1;
        ++r.long_predictions;
    }
    if (!times.empty()) {
        r.mean = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
        auto mid = times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2);
        std::nth_element(times.begin(), mid, times.end());
        r.median = *mid;
        r.min = *std::min_element(times.begin(), times.end());
        r.max = *std::max_element(times.begin(), times.end());
    }
    return r;
}

std::string format_bench(const BenchReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "config=%s n=%lld mean=%.3e median=%.3e min=%.3e max=%.3e reference_mean=%.3e "
                  "updates=%lld short=%lld long=%lld",
                  std::string(to_string(r.config)).c_str(), static_cast<long long>(r.iterations), r.mean, r.median,
                  r.min, r.max, reference_mean_seconds(r.config), static_cast<long long>(r.updates),
                  static_cast<long long>(r.short_predictions), static_cast<long long>(r.long_predictions));
    return buf;
}

} // namespace netcast
