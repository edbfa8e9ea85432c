#include "netcast/alarms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netcast/errors.hpp"

namespace netcast {

void validate(const Thresholds& th) {
    if (!std::isfinite(th.warning) || !std::isfinite(th.critical) || !(th.warning < th.critical)) {
        throw InputError("thresholds need finite W < C");
    }
}

std::string_view to_string(AlarmKind kind) {
    switch (kind) {
    case AlarmKind::anomaly:
        return "anomaly";
    case AlarmKind::warning_short:
        return "warning_short";
    case AlarmKind::critical_short:
        return "critical_short";
    case AlarmKind::warning_long:
        return "warning_long";
    case AlarmKind::critical_long:
        return "critical_long";
    }
    return "unknown";
}

std::optional<AlarmKind> parse_alarm_kind(std::string_view s) {
    for (auto k : {AlarmKind::anomaly, AlarmKind::warning_short, AlarmKind::critical_short, AlarmKind::warning_long,
                   AlarmKind::critical_long}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

ViolationWindow::ViolationWindow(int window_len, int min_violations) : min_violations_(min_violations) {
    if (window_len < 1) {
        throw InputError("violation window length must be >= 1");
    }
    if (min_violations < 1 || min_violations > window_len) {
        throw InputError("min_violations must lie in 1..window_len");
    }
    flags_.assign(static_cast<std::size_t>(window_len), 0);
}

int ViolationWindow::push(bool violation) {
    count_ -= flags_[head_];
    flags_[head_] = violation ? 1 : 0;
    count_ += flags_[head_];
    head_ = (head_ + 1) % flags_.size();
    return count_;
}

std::vector<bool> ViolationWindow::history() const {
    std::vector<bool> out;
    out.reserve(flags_.size());
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        out.push_back(flags_[(head_ + i) % flags_.size()] != 0);
    }
    return out;
}

void ViolationWindow::restore(const std::vector<bool>& oldest_first) {
    if (oldest_first.size() != flags_.size()) {
        throw InputError("violation history length mismatch");
    }
    head_ = 0;
    count_ = 0;
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        flags_[i] = oldest_first[i] ? 1 : 0;
        count_ += flags_[i];
    }
}

std::optional<Alarm> check_anomaly(double x, const Forecast& f, ViolationWindow& window, std::int64_t at_step) {
    const int count = window.push(x < f.lower || x > f.upper);
    if (count >= window.min_violations()) {
        return Alarm{AlarmKind::anomaly, at_step, std::nullopt, count};
    }
    return std::nullopt;
}

std::vector<Alarm> check_threshold_short(std::span<const Forecast> forecasts, const Thresholds& th,
                                         std::int64_t at_step) {
    std::vector<Alarm> out;
    auto level_alarm = [&](double level, AlarmKind kind) {
        std::optional<int> first;
        int hits = 0;
        for (const auto& f : forecasts) {
            if (f.upper >= level) {
                ++hits;
                if (!first) {
                    first = f.horizon;
                }
            }
        }
        if (hits > 0) {
            out.push_back(Alarm{kind, at_step, first, hits});
        }
    };
    level_alarm(th.warning, AlarmKind::warning_short);
    level_alarm(th.critical, AlarmKind::critical_short);
    return out;
}

std::optional<int> crossing_time_linear(double a0, double a1, double level, int max_j) {
    if (max_j < 1) {
        return std::nullopt;
    }
    if (a0 >= level) {
        return 1;
    }
    if (!(a1 > 0.0)) {
        return std::nullopt;
    }
    auto above = [&](long long j) { return a0 + a1 * static_cast<double>(j) > level; };
    // Closed form j > (level - a0)/a1, then settle rounding ties against the
    // forecast itself so the answer matches a direct scan.
    const double bound = (level - a0) / a1;
    long long j = bound >= static_cast<double>(max_j) ? max_j + 1LL : static_cast<long long>(std::floor(bound)) + 1;
    j = std::max(j, 1LL);
    while (j > 1 && above(j - 1)) {
        --j;
    }
    while (j <= max_j && !above(j)) {
        ++j;
    }
    if (j > max_j) {
        return std::nullopt;
    }
    return static_cast<int>(j);
}

std::optional<int> crossing_time_seasonal(std::span<const double> cycle, double level, int max_j) {
    const auto s = static_cast<int>(cycle.size());
    if (s == 0) {
        return std::nullopt;
    }
    // The cycle repeats, so only the first s horizons need a look.
    const int limit = std::min(max_j, s);
    for (int j = 1; j <= limit; ++j) {
        if (cycle[static_cast<std::size_t>(j % s)] > level) {
            return j;
        }
    }
    return std::nullopt;
}

std::optional<int> crossing_time_combined(double a0, double a1, std::span<const double> cycle, double level,
                                          int max_j) {
    const auto s = static_cast<int>(cycle.size());
    if (s == 0) {
        return std::nullopt;
    }
    for (int k = 1; k <= max_j; ++k) {
        if (a0 + a1 * static_cast<double>(k) + cycle[static_cast<std::size_t>(k % s)] > level) {
            return k;
        }
    }
    return std::nullopt;
}

double tail_mass(std::span<const double> pi, double level) {
    double mass = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (static_cast<double>(i + 1) > level) {
            mass += pi[i];
        }
    }
    return mass;
}

std::vector<Alarm> check_long_term_discrete(std::span<const double> pi, const Thresholds& th, double mass_threshold,
                                            std::int64_t at_step) {
    std::vector<Alarm> out;
    if (tail_mass(pi, th.warning) > mass_threshold) {
        out.push_back(Alarm{AlarmKind::warning_long, at_step, std::nullopt, 1});
    }
    if (tail_mass(pi, th.critical) > mass_threshold) {
        out.push_back(Alarm{AlarmKind::critical_long, at_step, std::nullopt, 1});
    }
    return out;
}

} // namespace netcast
