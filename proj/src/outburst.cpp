#include "netcast/outburst.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netcast/errors.hpp"

namespace netcast {

int OutburstSlot::distance(std::int64_t step) const {
    const std::int64_t p = period;
    const std::int64_t r = ((step - offset) % p + p) % p;
    return static_cast<int>(std::min(r, p - r));
}

void validate(const OutburstSlot& slot) {
    if (slot.period < 1) {
        throw InputError("outburst period must be positive");
    }
    if (slot.offset < 0 || slot.offset >= slot.period) {
        throw InputError("outburst offset must lie in [0, period)");
    }
    if (slot.tolerance < 0 || 2 * slot.tolerance >= slot.period) {
        throw InputError("outburst tolerance must satisfy 0 <= 2*tolerance < period");
    }
}

OutburstProcess::OutburstProcess(OutburstSlot slot) : slot_(slot) {
    validate(slot_);
}

bool OutburstProcess::is_outburst_time(std::int64_t step) const {
    return slot_.distance(step) <= slot_.tolerance;
}

void OutburstProcess::update(double x) {
    if (!std::isfinite(x)) {
        throw InputError("outburst observation must be finite");
    }
    ++count_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
}

std::optional<double> OutburstProcess::mean() const {
    if (count_ < 1) {
        return std::nullopt;
    }
    return mean_;
}

std::optional<double> OutburstProcess::variance() const {
    if (count_ < 2) {
        return std::nullopt;
    }
    return std::max(m2_, 0.0) / static_cast<double>(count_ - 1);
}

Forecast OutburstProcess::predict(double coverage, int horizon) const {
    if (count_ < 2) {
        throw InsufficientData("outburst forecast needs at least 2 observations, have " +
                               std::to_string(count_));
    }
    const double p = static_cast<double>(count_);
    const double scale2 = (1.0 + 1.0 / p) * *variance();
    const double half = student_t_half_width_quantile(coverage, p - 1.0) * std::sqrt(scale2);
    return Forecast{horizon, mean_, scale2, mean_ - half, mean_ + half, coverage, ForecastSource::outburst};
}

void OutburstProcess::restore(std::int64_t count, double mean, double sum_sq_dev) {
    if (count < 0 || !std::isfinite(mean) || !(sum_sq_dev >= 0.0)) {
        throw InputError("invalid outburst moments");
    }
    count_ = count;
    mean_ = mean;
    m2_ = sum_sq_dev;
}

} // namespace netcast
