#pragma once

#include <cstdint>
#include <string_view>

namespace netcast {

enum class ForecastSource : std::uint8_t { dlm = 1, outburst = 2, markov = 3 };

std::string_view to_string(ForecastSource s);

// Point and central predictive interval for one horizon step.
//
// For DLM forecasts `variance` is Q_n(k) and the interval is the symmetric
// normal interval. For outburst forecasts it is the squared scale of the
// Student-t predictive, and for Markov forecasts the variance of the
// predictive distribution over states (interval bounds are states).
struct Forecast {
    int horizon = 1;
    double point = 0.0;
    double variance = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double coverage = 0.95;
    ForecastSource source = ForecastSource::dlm;

    [[nodiscard]] bool contains(double x) const { return x >= lower && x <= upper; }

    friend bool operator==(const Forecast&, const Forecast&) = default;
};

// Two-sided standard normal quantile z at probability (1 + coverage) / 2.
[[nodiscard]] double normal_half_width_quantile(double coverage);

// Two-sided Student-t quantile at probability (1 + coverage) / 2.
[[nodiscard]] double student_t_half_width_quantile(double coverage, double dof);

[[nodiscard]] Forecast normal_forecast(int horizon, double point, double variance, double coverage);

} // namespace netcast
