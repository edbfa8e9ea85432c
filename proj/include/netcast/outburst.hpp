#pragma once

#include <cstdint>
#include <optional>

#include "netcast/forecast.hpp"

namespace netcast {

/// Where a regular outburst lands: every `period` steps at `offset`, give or
/// take `tolerance` steps.
struct OutburstSlot {
    int period = 0;
    int offset = 0;
    int tolerance = 1;

    /// Circular distance (in steps) between `step` and the nearest slot.
    [[nodiscard]] int distance(std::int64_t step) const;

    friend bool operator==(const OutburstSlot&, const OutburstSlot&) = default;
};

/// Throws InputError unless period >= 1, 0 <= offset < period and
/// 0 <= 2 * tolerance < period.
void validate(const OutburstSlot& slot);

/// Normal model for one regular outburst process under the 1/sigma^2 prior.
/// Keeps the count, running mean and the sum of squared deviations, so the
/// exposed moments are always the exact sample mean and sample variance.
class OutburstProcess {
public:
    OutburstProcess() = default;
    explicit OutburstProcess(OutburstSlot slot);

    [[nodiscard]] bool is_outburst_time(std::int64_t step) const;

    void update(double x);

    [[nodiscard]] std::int64_t count() const { return count_; }
    [[nodiscard]] std::optional<double> mean() const;
    [[nodiscard]] std::optional<double> variance() const;
    [[nodiscard]] const OutburstSlot& slot() const { return slot_; }
    [[nodiscard]] double sum_sq_dev() const { return m2_; }

    /// Student-t predictive with count - 1 degrees of freedom:
    /// mu_p +- t * sqrt((1 + 1/p) sigma_p^2). Throws InsufficientData while
    /// fewer than two outbursts have been seen.
    [[nodiscard]] Forecast predict(double coverage, int horizon = 1) const;

    /// Restores raw moments from a snapshot.
    void restore(std::int64_t count, double mean, double sum_sq_dev);

private:
    OutburstSlot slot_;
    std::int64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

} // namespace netcast
