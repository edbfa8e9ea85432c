#include "netcast/forecast.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "netcast/errors.hpp"

namespace netcast {

std::string_view to_string(ForecastSource s) {
    switch (s) {
    case ForecastSource::dlm:
        return "dlm";
    case ForecastSource::outburst:
        return "outburst";
    case ForecastSource::markov:
        return "markov";
    }
    return "unknown";
}

namespace {

void check_coverage(double coverage) {
    if (!(coverage >= 0.0 && coverage < 1.0)) {
        throw InputError("coverage must lie in [0, 1), got " + std::to_string(coverage));
    }
}

} // namespace

double normal_half_width_quantile(double coverage) {
    check_coverage(coverage);
    if (coverage == 0.0) {
        return 0.0;
    }
    boost::math::normal_distribution<double> dist;
    return boost::math::quantile(dist, 0.5 * (1.0 + coverage));
}

double student_t_half_width_quantile(double coverage, double dof) {
    check_coverage(coverage);
    if (!(dof > 0.0)) {
        throw InputError("Student-t degrees of freedom must be positive");
    }
    if (coverage == 0.0) {
        return 0.0;
    }
    boost::math::students_t_distribution<double> dist(dof);
    return boost::math::quantile(dist, 0.5 * (1.0 + coverage));
}

Forecast normal_forecast(int horizon, double point, double variance, double coverage) {
    const double half = normal_half_width_quantile(coverage) * std::sqrt(variance);
    return Forecast{horizon, point, variance, point - half, point + half, coverage, ForecastSource::dlm};
}

} // namespace netcast
