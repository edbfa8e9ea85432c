#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "netcast/alarms.hpp"
#include "netcast/config.hpp"
#include "netcast/outburst.hpp"

namespace netcast {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Uniformly spaced training data; NaN marks a missing sample.
struct TrainingWindow {
    std::vector<double> values;
    std::int64_t step_seconds = 600;
    std::int64_t start_time = 0;

    [[nodiscard]] std::size_t observed() const;
};

enum class SeriesKind : std::uint8_t { continuous = 1, discrete = 2 };

struct Blueprint {
    SeriesKind kind = SeriesKind::continuous;
    std::optional<int> seasonal_period;
    std::vector<OutburstSlot> outburst_slots;
    std::optional<int> states; // discrete only

    friend bool operator==(const Blueprint&, const Blueprint&) = default;
};

/// Discrete iff every observed value is a nonnegative integer and there are at
/// most `distinct_cap` distinct values. Throws InsufficientData below
/// `min_points` observed values.
[[nodiscard]] SeriesKind classify(const TrainingWindow& w, int distinct_cap = 100, int min_points = 100);

/// Biased sample autocorrelation for lags 0..max_lag. Missing values are
/// replaced by the sample mean. A constant series yields all zeros past lag 0.
[[nodiscard]] std::vector<double> sample_acf(std::span<const double> x, std::size_t max_lag);

/// Lags t where acf(t) and acf(t+1) have opposite signs (zeros take the sign
/// of the next nonzero lag).
[[nodiscard]] std::vector<int> acf_sign_changes(std::span<const double> acf);

struct SeasonalityEvidence {
    std::vector<int> sign_changes;
    double mean_gap = 0.0;
    double sd_gap = 0.0;
    std::optional<int> period;
};

/// Lag horizon used for the ACF: min(n/3, two weeks of steps).
[[nodiscard]] std::size_t acf_lag_horizon(std::size_t n, std::int64_t step_seconds);

/// Seasonality from the spacing of ACF sign changes: with changes
/// t_1 < ... < t_j, the gaps t_{i+2} - t_i must have sd/mean < r. The series
/// is linearly detrended first.
[[nodiscard]] SeasonalityEvidence seasonality_evidence(const TrainingWindow& w, double r);
[[nodiscard]] std::optional<int> detect_seasonality(const TrainingWindow& w, double r = 0.1);

/// Per-slot counts behind the outburst decision.
struct SlotEvidence {
    int periods = 0;                  // b, whole periods in the window
    std::vector<int> periods_hit;     // b_j per slot, with +-tolerance
    std::vector<int> exact_hits;      // flagged periods at exactly that slot
    std::vector<std::uint8_t> flagged; // per sample
};

/// Indices lying more than `gamma` standard deviations from the mean, with
/// the mean and sd re-estimated once without the first-pass flags.
[[nodiscard]] std::vector<std::uint8_t> flag_outliers(std::span<const double> x, double gamma);

[[nodiscard]] SlotEvidence outburst_evidence(std::span<const double> residuals, double gamma, int candidate_period,
                                             int tolerance);

/// Regular outburst slots: a slot is kept when b_j / b > q and it holds the
/// most exact hits among its +-1 neighbours (lowest index on ties), so one
/// peak does not produce several adjacent slots. Throws InsufficientData
/// when the window covers fewer than two periods.
[[nodiscard]] std::vector<OutburstSlot> detect_outbursts(const TrainingWindow& w, double gamma, double q,
                                                         int candidate_period, int tolerance = 1);

/// Same decision on an arbitrary residual series (used after detrending and
/// removing the seasonal profile).
[[nodiscard]] std::vector<OutburstSlot> detect_outbursts_in(std::span<const double> residuals, double gamma,
                                                            double q, int candidate_period, int tolerance = 1);

/// Residuals used for outburst detection: detrended series with the mean
/// seasonal profile removed when `period` is set. Missing stays NaN.
[[nodiscard]] std::vector<double> outburst_residuals(const TrainingWindow& w, std::optional<int> period);

/// Full identification. Discrete series get K = ceil(C) + c (or the observed
/// maximum + c without thresholds).
[[nodiscard]] Blueprint build_blueprint(const TrainingWindow& w, const Config& cfg,
                                        const std::optional<Thresholds>& thresholds = std::nullopt);

} // namespace netcast
