#include "netcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "netcast/errors.hpp"
#include "netcast/records.hpp"

namespace netcast {

namespace {

constexpr std::pair<SynthKind, std::string_view> kNames[] = {
    {SynthKind::trend, "trend"},
    {SynthKind::trend_seasonal, "trend+seasonal"},
    {SynthKind::trend_outburst, "trend+outburst"},
    {SynthKind::trend_seasonal_outburst, "trend+seasonal+outburst"},
    {SynthKind::discrete, "discrete"},
};

bool has_season(SynthKind k) {
    return k == SynthKind::trend_seasonal || k == SynthKind::trend_seasonal_outburst;
}

bool has_outburst(SynthKind k) {
    return k == SynthKind::trend_outburst || k == SynthKind::trend_seasonal_outburst;
}

} // namespace

std::string_view to_string(SynthKind k) {
    for (const auto& [kind, name] : kNames) {
        if (kind == k) {
            return name;
        }
    }
    return "?";
}

std::optional<SynthKind> parse_synth_kind(std::string_view s) {
    for (const auto& [kind, name] : kNames) {
        if (name == s) {
            return kind;
        }
    }
    return std::nullopt;
}

std::vector<double> synth_values(const SynthParams& p) {
    if (p.length < 0) {
        throw InputError("synth length must be nonnegative");
    }
    std::mt19937_64 rng(p.seed);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(p.length));

    if (p.kind == SynthKind::discrete) {
        if (p.states < 2) {
            throw InputError("discrete synth needs at least 2 states");
        }
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_int_distribution<int> any(1, p.states);
        int s = std::clamp(static_cast<int>(std::lround(p.level)), 1, p.states);
        for (std::int64_t i = 0; i < p.length; ++i) {
            const double r = u(rng);
            if (r < 0.2) {
                s = std::max(1, s - 1);
            } else if (r < 0.4) {
                s = std::min(p.states, s + 1);
            } else if (r < 0.45) {
                s = any(rng);
            }
            out.push_back(static_cast<double>(s));
        }
        return out;
    }

    if (has_season(p.kind) && p.period < 3) {
        throw InputError("seasonal synth needs period >= 3");
    }
    if (has_outburst(p.kind) && (p.outburst_period < 1 || p.outburst_offset < 0 ||
                                 p.outburst_offset >= p.outburst_period)) {
        throw InputError("outburst offset must lie in [0, outburst_period)");
    }
    std::normal_distribution<double> eps(0.0, p.noise);
    for (std::int64_t i = 0; i < p.length; ++i) {
        const double t = static_cast<double>(i);
        double x = p.level + p.slope * t + eps(rng);
        if (has_season(p.kind)) {
            x += p.amplitude * std::sin(2.0 * std::numbers::pi * t / p.period);
        }
        if (has_outburst(p.kind) && i % p.outburst_period == p.outburst_offset) {
            x += p.outburst_height;
        }
        out.push_back(x);
    }
    return out;
}

std::string synth_text(const SynthParams& p, std::string_view series_id) {
    const auto values = synth_values(p);
    std::string s = "# synth kind=" + std::string(to_string(p.kind)) + " seed=" + std::to_string(p.seed) +
                    " length=" + std::to_string(p.length) + " step=" + std::to_string(p.step_seconds) + "\n";
    IngestEvent ev;
    ev.series_id = std::string(series_id);
    for (std::size_t i = 0; i < values.size(); ++i) {
        ev.timestamp = p.start_time + static_cast<std::int64_t>(i) * p.step_seconds;
        ev.value = values[i];
        s += format_ingest_line(ev);
        s += '\n';
    }
    return s;
}

} // namespace netcast
