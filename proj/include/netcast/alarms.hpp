#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "netcast/forecast.hpp"

namespace netcast {

/// Warning and critical observation levels, W < C.
struct Thresholds {
    double warning = 0.0;
    double critical = 0.0;

    friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

void validate(const Thresholds& th);

enum class AlarmKind : std::uint8_t {
    anomaly = 1,
    warning_short = 2,
    critical_short = 3,
    warning_long = 4,
    critical_long = 5,
};

std::string_view to_string(AlarmKind kind);
std::optional<AlarmKind> parse_alarm_kind(std::string_view s);

struct Alarm {
    AlarmKind kind = AlarmKind::anomaly;
    std::int64_t at_step = 0;
    std::optional<int> horizon;
    int intensity = 1;

    friend bool operator==(const Alarm&, const Alarm&) = default;
};

/// Ring of the last `window_len` interval checks. An anomaly alarm fires while
/// at least `min_violations` of them were violations.
class ViolationWindow {
public:
    ViolationWindow() : ViolationWindow(10, 3) {}
    ViolationWindow(int window_len, int min_violations);

    /// Pushes one outcome and returns the violation count now in the window.
    int push(bool violation);

    [[nodiscard]] int window_len() const { return static_cast<int>(flags_.size()); }
    [[nodiscard]] int min_violations() const { return min_violations_; }
    [[nodiscard]] int violations() const { return count_; }

    /// Oldest-first view of the stored outcomes (for snapshots).
    [[nodiscard]] std::vector<bool> history() const;
    void restore(const std::vector<bool>& oldest_first);

private:
    std::vector<std::uint8_t> flags_;
    std::size_t head_ = 0;
    int count_ = 0;
    int min_violations_ = 3;
};

/// Interval check of `x` against the forecast made before it was observed.
std::optional<Alarm> check_anomaly(double x, const Forecast& f, ViolationWindow& window,
                                   std::int64_t at_step = 0);

/// Short-term two-level check. A level counts at horizon j when the interval
/// covers it or lies entirely above it (u_j >= level). One alarm per level,
/// horizon = first such j, intensity = number of such horizons.
std::vector<Alarm> check_threshold_short(std::span<const Forecast> forecasts, const Thresholds& th,
                                         std::int64_t at_step = 0);

/// First horizon j <= max_j with a0 + a1*j > level. Returns 1 when the current
/// level a0 is already at or above `level`; none for a non-increasing trend.
std::optional<int> crossing_time_linear(double a0, double a1, double level, int max_j);

/// First horizon j <= max_j with cycle[j % s] > level.
std::optional<int> crossing_time_seasonal(std::span<const double> cycle, double level, int max_j);

/// First horizon j <= max_j with a0 + a1*j + cycle[j % s] > level.
std::optional<int> crossing_time_combined(double a0, double a1, std::span<const double> cycle, double level,
                                          int max_j);

/// Probability mass of states strictly above `level` (states numbered from 1).
double tail_mass(std::span<const double> pi, double level);

/// Long-term discrete check: warning_long / critical_long when the stationary
/// mass above W / C is strictly greater than `mass_threshold`.
std::vector<Alarm> check_long_term_discrete(std::span<const double> pi, const Thresholds& th, double mass_threshold,
                                            std::int64_t at_step = 0);

} // namespace netcast
