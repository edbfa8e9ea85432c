#include "netcast/identify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "netcast/errors.hpp"

namespace netcast {

namespace {

// Least-squares line through the observed samples, evaluated everywhere.
std::vector<double> detrend(std::span<const double> x) {
    double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i])) {
            continue;
        }
        const double t = static_cast<double>(i);
        n += 1.0;
        sx += t;
        sy += x[i];
        sxx += t * t;
        sxy += t * x[i];
    }
    std::vector<double> out(x.begin(), x.end());
    if (n == 0.0) {
        return out;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = denom > 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - slope * sx) / n;
    double scale = 0.0;
    for (double v : x) {
        if (!std::isnan(v)) {
            scale = std::max(scale, std::abs(v));
        }
    }
    // Residuals at rounding level are exact fits, not structure.
    const double floor = 1e-12 * (1.0 + scale);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!std::isnan(out[i])) {
            out[i] -= intercept + slope * static_cast<double>(i);
            if (std::abs(out[i]) <= floor) {
                out[i] = 0.0;
            }
        }
    }
    return out;
}

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

Moments moments(std::span<const double> x, const std::vector<std::uint8_t>* exclude) {
    Moments m;
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i]) || (exclude && (*exclude)[i])) {
            continue;
        }
        sum += x[i];
        ++m.n;
    }
    if (m.n == 0) {
        return m;
    }
    m.mean = sum / static_cast<double>(m.n);
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i]) || (exclude && (*exclude)[i])) {
            continue;
        }
        ss += (x[i] - m.mean) * (x[i] - m.mean);
    }
    m.sd = m.n > 1 ? std::sqrt(ss / static_cast<double>(m.n - 1)) : 0.0;
    return m;
}

double median_of(std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) {
        return *mid;
    }
    const double hi = *mid;
    return 0.5 * (hi + *std::max_element(v.begin(), mid));
}

} // namespace

std::size_t TrainingWindow::observed() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return !std::isnan(v); }));
}

SeriesKind classify(const TrainingWindow& w, int distinct_cap, int min_points) {
    if (w.observed() < static_cast<std::size_t>(std::max(min_points, 1))) {
        throw InsufficientData("classification needs at least " + std::to_string(min_points) +
                               " observed values, have " + std::to_string(w.observed()));
    }
    std::set<double> distinct;
    for (double v : w.values) {
        if (std::isnan(v)) {
            continue;
        }
        if (!(v >= 0.0) || v != std::floor(v)) {
            return SeriesKind::continuous;
        }
        distinct.insert(v);
        if (distinct.size() > static_cast<std::size_t>(distinct_cap)) {
            return SeriesKind::continuous;
        }
    }
    return SeriesKind::discrete;
}

std::vector<double> sample_acf(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    std::vector<double> acf(max_lag + 1, 0.0);
    const Moments m = moments(x, nullptr);
    if (n == 0 || m.n == 0) {
        return acf;
    }
    std::vector<double> c(n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = std::isnan(x[i]) ? 0.0 : x[i] - m.mean;
        scale = std::max(scale, std::abs(x[i]));
    }
    const double denom = std::inner_product(c.begin(), c.end(), c.begin(), 0.0);
    // Rounding noise in an (affinely) constant series is not a signal.
    if (!(denom > 1e-20 * static_cast<double>(n) * (1.0 + scale * scale))) {
        return acf;
    }
    acf[0] = 1.0;
    for (std::size_t lag = 1; lag <= max_lag && lag < n; ++lag) {
        double s = 0.0;
        for (std::size_t i = lag; i < n; ++i) {
            s += c[i] * c[i - lag];
        }
        acf[lag] = s / denom;
    }
    return acf;
}

std::vector<int> acf_sign_changes(std::span<const double> acf) {
    const std::size_t L = acf.size();
    std::vector<int> sign(L, 0);
    int next = 0;
    for (std::size_t k = L; k-- > 0;) {
        if (acf[k] > 0.0) {
            next = 1;
        } else if (acf[k] < 0.0) {
            next = -1;
        }
        sign[k] = next;
    }
    std::vector<int> changes;
    for (std::size_t t = 0; t + 1 < L; ++t) {
        if (sign[t] * sign[t + 1] < 0) {
            changes.push_back(static_cast<int>(t));
        }
    }
    return changes;
}

std::size_t acf_lag_horizon(std::size_t n, std::int64_t step_seconds) {
    const auto two_weeks = static_cast<std::size_t>(2 * (7 * 86400 / std::max<std::int64_t>(step_seconds, 1)));
    return std::min(n / 3, std::max<std::size_t>(two_weeks, 1));
}

SeasonalityEvidence seasonality_evidence(const TrainingWindow& w, double r) {
    SeasonalityEvidence ev;
    const auto resid = detrend(w.values);
    const auto acf = sample_acf(resid, acf_lag_horizon(resid.size(), w.step_seconds));
    ev.sign_changes = acf_sign_changes(acf);
    const std::size_t j = ev.sign_changes.size();
    if (j < 3) {
        return ev;
    }
    std::vector<double> gaps;
    gaps.reserve(j - 2);
    for (std::size_t i = 0; i + 2 < j; ++i) {
        gaps.push_back(static_cast<double>(ev.sign_changes[i + 2] - ev.sign_changes[i]));
    }
    const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
    double ss = 0.0;
    for (double g : gaps) {
        ss += (g - mean) * (g - mean);
    }
    ev.mean_gap = mean;
    ev.sd_gap = std::sqrt(ss / static_cast<double>(gaps.size()));
    if (mean > 0.0 && ev.sd_gap / mean < r) {
        const int period = static_cast<int>(std::lround(mean));
        if (period >= 3) {
            ev.period = period;
        }
    }
    return ev;
}

std::optional<int> detect_seasonality(const TrainingWindow& w, double r) {
    return seasonality_evidence(w, r).period;
}

std::vector<std::uint8_t> flag_outliers(std::span<const double> x, double gamma) {
    std::vector<std::uint8_t> flags(x.size(), 0);
    auto flag_with = [&](const Moments& m) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            flags[i] = !std::isnan(x[i]) && std::abs(x[i] - m.mean) > gamma * m.sd ? 1 : 0;
        }
    };
    flag_with(moments(x, nullptr));
    const auto first = flags;
    const Moments robust = moments(x, &first);
    if (robust.n > 1) {
        flag_with(robust);
    }
    return flags;
}

SlotEvidence outburst_evidence(std::span<const double> residuals, double gamma, int candidate_period,
                               int tolerance) {
    if (candidate_period < 1) {
        throw InputError("candidate period must be positive");
    }
    const auto P = static_cast<std::size_t>(candidate_period);
    SlotEvidence ev;
    ev.periods = static_cast<int>(residuals.size() / P);
    ev.flagged = flag_outliers(residuals, gamma);
    ev.periods_hit.assign(P, 0);
    ev.exact_hits.assign(P, 0);
    const auto used = static_cast<std::ptrdiff_t>(static_cast<std::size_t>(ev.periods) * P);
    for (std::size_t slot = 0; slot < P; ++slot) {
        for (int d = 0; d < ev.periods; ++d) {
            const auto base = static_cast<std::ptrdiff_t>(static_cast<std::size_t>(d) * P + slot);
            if (ev.flagged[static_cast<std::size_t>(base)]) {
                ++ev.exact_hits[slot];
            }
            for (int o = -tolerance; o <= tolerance; ++o) {
                const std::ptrdiff_t i = base + o;
                if (i >= 0 && i < used && ev.flagged[static_cast<std::size_t>(i)]) {
                    ++ev.periods_hit[slot];
                    break;
                }
            }
        }
    }
    return ev;
}

std::vector<double> outburst_residuals(const TrainingWindow& w, std::optional<int> period) {
    auto resid = detrend(w.values);
    if (!period || *period < 2) {
        return resid;
    }
    const auto s = static_cast<std::size_t>(*period);
    std::vector<double> sum(s, 0.0);
    std::vector<int> cnt(s, 0);
    for (std::size_t i = 0; i < resid.size(); ++i) {
        if (!std::isnan(resid[i])) {
            sum[i % s] += resid[i];
            ++cnt[i % s];
        }
    }
    std::vector<double> profile(s, 0.0);
    for (std::size_t p = 0; p < s; ++p) {
        profile[p] = cnt[p] > 0 ? sum[p] / cnt[p] : 0.0;
    }
    // Running median over +-2 phases keeps a regular one-slot peak out of the
    // seasonal profile.
    std::vector<double> smooth(s);
    for (std::size_t p = 0; p < s; ++p) {
        std::vector<double> nb;
        for (std::size_t o = 0; o < 5; ++o) {
            nb.push_back(profile[(p + s + o - 2) % s]);
        }
        smooth[p] = median_of(std::move(nb));
    }
    for (std::size_t i = 0; i < resid.size(); ++i) {
        if (!std::isnan(resid[i])) {
            resid[i] -= smooth[i % s];
        }
    }
    return resid;
}

std::vector<OutburstSlot> detect_outbursts(const TrainingWindow& w, double gamma, double q, int candidate_period,
                                           int tolerance) {
    return detect_outbursts_in(w.values, gamma, q, candidate_period, tolerance);
}

std::vector<OutburstSlot> detect_outbursts_in(std::span<const double> residuals, double gamma, double q,
                                              int candidate_period, int tolerance) {
    if (candidate_period < 1 || residuals.size() < 2 * static_cast<std::size_t>(candidate_period)) {
        throw InsufficientData("outburst detection needs at least two candidate periods of data");
    }
    const SlotEvidence ev = outburst_evidence(residuals, gamma, candidate_period, tolerance);
    const int P = candidate_period;
    auto exact = [&](int slot) { return ev.exact_hits[static_cast<std::size_t>(((slot % P) + P) % P)]; };
    std::vector<OutburstSlot> out;
    for (int slot = 0; slot < P; ++slot) {
        const int e = exact(slot);
        if (e == 0) {
            continue;
        }
        bool anchor = true;
        for (int o = 1; o <= tolerance && anchor; ++o) {
            anchor = e > exact(slot - o) && e >= exact(slot + o);
        }
        const double ratio = static_cast<double>(ev.periods_hit[static_cast<std::size_t>(slot)]) / ev.periods;
        if (anchor && ratio > q) {
            out.push_back(OutburstSlot{P, slot, tolerance});
        }
    }
    return out;
}

Blueprint build_blueprint(const TrainingWindow& w, const Config& cfg, const std::optional<Thresholds>& thresholds) {
    validate(cfg);
    const Config c = resolve_for_step(cfg, w.step_seconds);
    Blueprint bp;
    bp.kind = classify(w, c.distinct_cap, c.min_training);
    if (bp.kind == SeriesKind::discrete) {
        int top = 0;
        if (thresholds) {
            top = static_cast<int>(std::ceil(thresholds->critical));
        } else {
            for (double v : w.values) {
                if (!std::isnan(v)) {
                    top = std::max(top, static_cast<int>(v));
                }
            }
        }
        bp.states = std::max(2, top + c.extra_states);
        return bp;
    }
    bp.seasonal_period = detect_seasonality(w, c.seasonality_ratio);
    // Too short for two candidate periods: no regular outbursts can be told apart.
    if (w.values.size() >= 2 * static_cast<std::size_t>(c.candidate_period)) {
        const auto resid = outburst_residuals(w, bp.seasonal_period);
        bp.outburst_slots = detect_outbursts_in(resid, c.outlier_sigmas, c.repetition, c.candidate_period,
                                                c.slot_tolerance);
    }
    return bp;
}

} // namespace netcast
