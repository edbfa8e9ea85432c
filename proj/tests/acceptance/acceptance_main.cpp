// Acceptance checks. Each criterion prints one PASS/FAIL line; tolerances are
// fixed below.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netcast/alarms.hpp"
#include "netcast/bench.hpp"
#include "netcast/dlm.hpp"
#include "netcast/engine.hpp"
#include "netcast/identify.hpp"
#include "netcast/markov.hpp"
#include "netcast/outburst.hpp"
#include "netcast/records.hpp"
#include "netcast/runner.hpp"
#include "netcast/synth.hpp"
#include "oracles/dense_dlm.hpp"
#include "oracles/discrete.hpp"
#include "oracles/quantiles.hpp"

using namespace netcast;

namespace {

// Pinned tolerances.
constexpr double kBenchFactor = 10.0;        // within 10x of the reference means
constexpr double kSeasonalSlowdown = 10.0;   // seasonal >= 10x linear
constexpr std::int64_t kBenchPoints = 15000;
constexpr std::size_t kSeasonalSnapshotMax = 1u << 20;
constexpr std::size_t kMarkovSnapshotMax = 64u << 10;
constexpr std::int64_t kMemoryUpdates = 100000;
constexpr double kCoverageLow = 0.92;
constexpr double kCoverageHigh = 0.98;
constexpr int kSeeds = 20;
constexpr int kSeedsRequired = 19;
constexpr double kStationaryResidual = 1e-8;
constexpr double kHandStationary = 1e-10;
constexpr double kFilterRelative = 1e-9;
constexpr double kOutburstRelative = 1e-9;
constexpr double kHalfWidthRelative = 1e-9;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void require(Outcome& o, bool ok, const std::string& what) {
    if (!ok) {
        o.pass = false;
        o.detail += (o.detail.empty() ? "" : "; ") + what;
    }
}

void note(Outcome& o, const std::string& what) {
    o.detail += (o.detail.empty() ? "" : "; ") + what;
}

double rel(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TrainingWindow window_of(const std::vector<double>& v, std::size_t n, std::int64_t h = 600) {
    TrainingWindow w;
    w.values.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
    w.step_seconds = h;
    return w;
}

// ---- 1: bench ----

const std::map<BenchConfig, BenchReport>& bench_reports() {
    static const auto reports = [] {
        std::map<BenchConfig, BenchReport> r;
        for (auto c : {BenchConfig::linear, BenchConfig::seasonal, BenchConfig::outburst, BenchConfig::markov}) {
            r[c] = run_bench(c, kBenchPoints, 1);
        }
        return r;
    }();
    return reports;
}

Outcome bench_upper() {
    Outcome o;
    const auto& r = bench_reports();
    for (const auto& [c, rep] : r) {
        const double ref = reference_mean_seconds(c);
        note(o, fmt("%s mean %.3g s (ref %.3g)", std::string(to_string(c)).c_str(), rep.mean, ref));
        require(o, rep.mean <= kBenchFactor * ref, std::string(to_string(c)) + " above 10x reference");
    }
    const double ratio = r.at(BenchConfig::seasonal).mean / r.at(BenchConfig::linear).mean;
    note(o, fmt("seasonal/linear %.1fx", ratio));
    require(o, ratio >= kSeasonalSlowdown, "seasonal not 10x slower than linear");
    return o;
}

Outcome bench_lower() {
    Outcome o;
    for (const auto& [c, rep] : bench_reports()) {
        const double ref = reference_mean_seconds(c);
        note(o, fmt("%s %.3g s vs floor %.3g", std::string(to_string(c)).c_str(), rep.mean, ref / kBenchFactor));
        require(o, rep.mean >= ref / kBenchFactor, std::string(to_string(c)) + " more than 10x faster than reference");
    }
    return o;
}

// ---- 2: memory ----

std::pair<std::size_t, std::size_t> snapshot_sizes(SeriesModel m, const std::vector<double>& v) {
    std::size_t early = 0;
    for (std::int64_t i = 0; i < kMemoryUpdates; ++i) {
        m.warm(v[static_cast<std::size_t>(i)]);
        if (i == 999) {
            early = m.serialize().size();
        }
    }
    return {early, m.serialize().size()};
}

Outcome memory_contract() {
    Outcome o;
    SynthParams p;
    p.length = kMemoryUpdates;

    p.kind = SynthKind::trend_seasonal;
    Blueprint seasonal;
    seasonal.seasonal_period = 144;
    const auto [s0, s1] = snapshot_sizes(SeriesModel::from_blueprint("s", seasonal, 600, 0, Thresholds{80, 90}, {}),
                                         synth_values(p));
    note(o, fmt("seasonal(144) %zu -> %zu bytes", s0, s1));
    require(o, s0 == s1, "seasonal snapshot grew");
    require(o, s1 < kSeasonalSnapshotMax, "seasonal snapshot >= 1 MB");

    p.kind = SynthKind::discrete;
    p.states = 50;
    p.level = 25;
    Blueprint markov;
    markov.kind = SeriesKind::discrete;
    markov.states = 50;
    const auto [m0, m1] = snapshot_sizes(SeriesModel::from_blueprint("m", markov, 600, 0, Thresholds{40, 45}, {}),
                                         synth_values(p));
    note(o, fmt("markov(50) %zu -> %zu bytes", m0, m1));
    require(o, m0 == m1, "markov snapshot grew");
    require(o, m1 < kMarkovSnapshotMax, "markov snapshot >= 64 KB");

    p.kind = SynthKind::trend_outburst;
    Blueprint outburst;
    outburst.outburst_slots.push_back(OutburstSlot{144, 36, 1});
    const auto [b0, b1] = snapshot_sizes(SeriesModel::from_blueprint("b", outburst, 600, 0, std::nullopt, {}),
                                         synth_values(p));
    note(o, fmt("trend+outburst %zu -> %zu bytes", b0, b1));
    require(o, b0 == b1, "outburst snapshot grew");
    return o;
}

// ---- 3: coverage ----

Outcome interval_coverage() {
    Outcome o;
    constexpr std::size_t train = 5040;
    constexpr std::size_t held = 5000;
    std::vector<double> per_seed;
    for (int seed = 1; seed <= kSeeds; ++seed) {
        SynthParams p;
        p.kind = SynthKind::trend;
        p.seed = static_cast<std::uint64_t>(seed);
        p.length = static_cast<std::int64_t>(train + held);
        const auto v = synth_values(p);
        auto m = SeriesModel::fit("c", window_of(v, train), std::nullopt, Config{});
        int hits = 0;
        int total = 0;
        for (std::size_t i = train; i < v.size(); ++i) {
            const auto rec = m.step({"c", static_cast<std::int64_t>(i) * 600, v[i]});
            if (rec.one_step) {
                ++total;
                hits += rec.one_step->contains(v[i]) ? 1 : 0;
            }
        }
        per_seed.push_back(static_cast<double>(hits) / total);
        require(o, total == static_cast<int>(held), fmt("seed %d had %d forecasts", seed, total));
    }
    const double med = median(per_seed);
    note(o, fmt("median %.4f, range [%.4f, %.4f] over %d seeds", med,
                *std::min_element(per_seed.begin(), per_seed.end()),
                *std::max_element(per_seed.begin(), per_seed.end()), kSeeds));
    require(o, med >= kCoverageLow && med <= kCoverageHigh, "median coverage outside [0.92, 0.98]");
    return o;
}

// ---- 4: identification ----

std::vector<double> spike_fixture(const std::vector<int>& days, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> e(0.0, 1.0);
    std::vector<double> x(5 * 144);
    for (auto& v : x) {
        v = 20.0 + e(rng);
    }
    for (int d : days) {
        x[static_cast<std::size_t>(d * 144 + 60)] += 12.0;
    }
    return x;
}

Outcome identification() {
    Outcome o;
    int seasonal_ok = 0;
    int noise_ok = 0;
    for (int seed = 1; seed <= kSeeds; ++seed) {
        SynthParams p;
        p.kind = SynthKind::trend_seasonal;
        p.seed = static_cast<std::uint64_t>(seed);
        p.amplitude = 3.0 * std::sqrt(2.0); // signal sd = 3 noise sd
        const auto s = build_blueprint(window_of(synth_values(p), 5040), Config{});
        seasonal_ok += s.seasonal_period && std::abs(*s.seasonal_period - 144) <= 1 ? 1 : 0;

        SynthParams n;
        n.kind = SynthKind::trend;
        n.slope = 0.0;
        n.seed = static_cast<std::uint64_t>(1000 + seed);
        const auto w = build_blueprint(window_of(synth_values(n), 5040), Config{});
        noise_ok += w.seasonal_period ? 0 : 1;
    }
    note(o, fmt("period found %d/%d, white noise clean %d/%d", seasonal_ok, kSeeds, noise_ok, kSeeds));
    require(o, seasonal_ok >= kSeedsRequired, "seasonal detection below 19/20");
    require(o, noise_ok >= kSeedsRequired, "white noise flagged seasonal above 1/20");

    TrainingWindow five;
    five.values = spike_fixture({0, 1, 2, 3, 4}, 7);
    const auto hit = detect_outbursts(five, 3.0, 0.8, 144);
    require(o, hit == std::vector<OutburstSlot>{OutburstSlot{144, 60, 1}}, "5/5 spike not detected as one slot");
    TrainingWindow three;
    three.values = spike_fixture({0, 2, 4}, 8);
    const auto miss = detect_outbursts(three, 3.0, 0.8, 144);
    require(o, miss.empty(), "3/5 spike accepted");
    note(o, fmt("5/5 -> %zu slot(s), 3/5 -> %zu", hit.size(), miss.size()));
    return o;
}

// ---- 5: markov ----

Outcome markov_correctness() {
    Outcome o;
    std::mt19937_64 rng(5);
    const MarkovPrior prior;

    int exact_failures = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int K = std::uniform_int_distribution<int>(2, 60)(rng);
        MarkovChain chain(K, prior);
        std::vector<std::vector<long long>> counts(K, std::vector<long long>(K, 0));
        std::uniform_int_distribution<int> pick(1, K);
        int last = pick(rng);
        chain.update(last);
        for (int t = 0; t < 2000; ++t) {
            const int next = pick(rng);
            chain.update(next);
            ++counts[last - 1][next - 1];
            last = next;
        }
        const auto p = chain.predict_next();
        auto prior_at = [&](int i, int j) {
            const int g = std::abs(i - j);
            return g == 0 ? 10LL : g == 1 ? 8LL : 2LL;
        };
        long long denom = 0;
        for (int j = 1; j <= K; ++j) {
            denom += prior_at(last, j) + counts[last - 1][j - 1];
        }
        for (int j = 1; j <= K; ++j) {
            const double want =
                static_cast<double>(prior_at(last, j) + counts[last - 1][j - 1]) / static_cast<double>(denom);
            exact_failures += p[static_cast<std::size_t>(j - 1)] == want ? 0 : 1;
        }
    }
    require(o, exact_failures == 0, fmt("%d predict_next entries differ from integer oracle", exact_failures));

    int interval_failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int K = std::uniform_int_distribution<int>(1, 80)(rng);
        std::vector<double> probs(static_cast<std::size_t>(K));
        std::exponential_distribution<double> ex(1.0);
        for (auto& q : probs) {
            q = ex(rng);
        }
        const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
        for (auto& q : probs) {
            q /= total;
        }
        const int state = std::uniform_int_distribution<int>(1, K)(rng);
        const double cov = std::uniform_real_distribution<double>(0.01, 0.999)(rng);
        const auto got = expand_interval(probs, state, cov);
        const auto want = oracle::expand_by_rounds(probs, state, cov);
        interval_failures += (got.lower == want.lower && got.upper == want.upper) ? 0 : 1;
    }
    require(o, interval_failures == 0, fmt("%d/1000 intervals differ from expansion oracle", interval_failures));

    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int K = trial < 5 ? 200 : std::uniform_int_distribution<int>(2, 200)(rng);
        MarkovChain chain(K, prior);
        std::uniform_int_distribution<int> pick(1, K);
        const int n = std::uniform_int_distribution<int>(0, 20000)(rng);
        for (int t = 0; t < n; ++t) {
            chain.update(pick(rng));
        }
        const Eigen::MatrixXd P = chain.transition_matrix();
        const auto pi = chain.stationary();
        const Eigen::Map<const Eigen::RowVectorXd> v(pi.data(), K);
        worst = std::max(worst, (v * P - v).lpNorm<1>());
    }
    note(o, fmt("worst stationary residual %.2e", worst));
    require(o, worst <= kStationaryResidual, "stationary residual above 1e-8");

    Eigen::MatrixXd P(2, 2);
    P << 0.9, 0.1, 0.5, 0.5;
    const auto pi = stationary_distribution(P);
    const double err = std::max(std::abs(pi[0] - 5.0 / 6.0), std::abs(pi[1] - 1.0 / 6.0));
    note(o, fmt("2-state error %.1e", err));
    require(o, err <= kHandStationary, "2-state stationary distribution off");
    return o;
}

// ---- 6: crossing times ----

Outcome crossing_times() {
    Outcome o;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int mism = 0;
    for (int i = 0; i < 10000; ++i) {
        const double a0 = 10.0 * u(rng);
        const double a1 = 0.5 * u(rng);
        const double level = 10.0 * u(rng) + 5.0;
        const int max_j = std::uniform_int_distribution<int>(0, 400)(rng);
        const int s = std::uniform_int_distribution<int>(3, 200)(rng);
        std::vector<double> cycle(static_cast<std::size_t>(s));
        for (auto& c : cycle) {
            c = 4.0 * u(rng);
        }
        mism += crossing_time_linear(a0, a1, level, max_j) != oracle::scan_linear(a0, a1, level, max_j);
        mism += crossing_time_seasonal(cycle, level / 4.0, max_j) != oracle::scan_seasonal(cycle, level / 4.0, max_j);
        mism += crossing_time_combined(a0, a1, cycle, level, max_j) != oracle::scan_cycle(a0, a1, cycle, level, max_j);
    }
    require(o, mism == 0, fmt("%d/30000 scan mismatches", mism));

    // Against the DLM's own point forecasts.
    int dlm_mism = 0;
    for (int i = 0; i < 200; ++i) {
        const int s = std::uniform_int_distribution<int>(3, 30)(rng);
        DlmModel m({make_trend_block(), make_seasonal_block(s)});
        Eigen::VectorXd mean(m.state_dim());
        for (Eigen::Index k = 0; k < mean.size(); ++k) {
            mean(k) = k < 2 ? (k == 0 ? 10.0 * u(rng) : 0.2 * u(rng)) : 3.0 * u(rng);
        }
        m.set_state(mean, m.covariance(), 0);
        const double level = 10.0 * u(rng) + 5.0;
        const auto tr = *m.trend();
        const auto cycle = *m.seasonal_cycle();
        const auto points = m.predict_points(60);
        std::optional<int> scan;
        for (int j = 1; j <= 60 && !scan; ++j) {
            if (points[static_cast<std::size_t>(j - 1)] > level) {
                scan = j;
            }
        }
        dlm_mism += crossing_time_combined(tr.level, tr.slope, cycle, level, 60) != scan;
    }
    require(o, dlm_mism == 0, fmt("%d/200 mismatches against DLM point forecasts", dlm_mism));

    const auto hand = crossing_time_linear(0.5, 0.01, 0.9, 100);
    require(o, hand == 41, "hand case (0.5, 0.01, 0.9) is not 41");
    note(o, fmt("30000 scan instances, 200 DLM states, hand case -> %d", hand.value_or(-1)));
    return o;
}

// ---- 7: filter ----

struct FilterCase {
    bool trend;
    int s;
};

double filter_error(const FilterCase& c, std::uint64_t seed, bool gaps) {
    std::vector<DlmBlock> blocks;
    if (c.trend) {
        blocks.push_back(make_trend_block());
    }
    if (c.s > 0) {
        blocks.push_back(make_seasonal_block(c.s));
    }
    DlmModel m(blocks);
    oracle::PreciseDenseDlm ref(c.trend, c.s, kDefaultPriorVariance, kDefaultDiscount, kDefaultDiscount);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> e(0.0, 1.0);
    double level = 10.0;
    double worst = 0.0;
    auto compare_predictions = [&] {
        const auto pk = m.predict_k(12);
        const auto rk = ref.predict(12);
        for (std::size_t j = 0; j < pk.size(); ++j) {
            worst = std::max({worst, rel(pk[j].point, rk[j].f), rel(pk[j].variance, rk[j].Q)});
        }
    };
    for (int i = 0; i < 1000; ++i) {
        level += 0.1 * e(rng);
        const double x = level + (c.s > 0 ? 3.0 * std::sin(6.283185307179586 * i / c.s) : 0.0) + e(rng);
        if (gaps && (i % 23 >= 20)) {
            m.update_missing();
            ref.missing();
        } else {
            const auto f = m.filter_update(x);
            const auto r = ref.update(x);
            worst = std::max({worst, rel(f.point, r.f), rel(f.variance, r.Q)});
        }
        if (i % 97 == 0) {
            compare_predictions();
        }
    }
    compare_predictions();
    const Eigen::VectorXd rm = ref.mean();
    const Eigen::MatrixXd rc = ref.covariance();
    for (Eigen::Index i = 0; i < rm.size(); ++i) {
        worst = std::max(worst, rel(m.mean()(i), rm(i)));
        for (Eigen::Index j = 0; j < rm.size(); ++j) {
            worst = std::max(worst, rel(m.covariance()(i, j), rc(i, j)));
        }
    }
    return worst;
}

Outcome filter_correctness() {
    Outcome o;
    const FilterCase cases[] = {{true, 0}, {false, 3}, {false, 7}, {false, 12}, {true, 4}, {true, 12}};
    for (const auto& c : cases) {
        double worst = 0.0;
        double worst_gap = 0.0;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            worst = std::max(worst, filter_error(c, seed, false));
            worst_gap = std::max(worst_gap, filter_error(c, seed + 100, true));
        }
        const std::string name = std::string(c.trend ? "trend" : "") + (c.trend && c.s ? "+" : "") +
                                 (c.s ? "seasonal(" + std::to_string(c.s) + ")" : "");
        note(o, fmt("%s %.1e / gaps %.1e", name.c_str(), worst, worst_gap));
        require(o, worst <= kFilterRelative, name + " filter off");
        require(o, worst_gap <= kFilterRelative, name + " gap handling off");
    }
    return o;
}

// ---- 8: outburst statistics ----

Outcome outburst_statistics() {
    Outcome o;
    std::mt19937_64 rng(8);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        OutburstProcess p(OutburstSlot{144, 10, 1});
        const int n = std::uniform_int_distribution<int>(2, 2000)(rng);
        const double loc = std::uniform_real_distribution<double>(-1e4, 1e4)(rng);
        const double scale = std::exp(std::uniform_real_distribution<double>(-5.0, 8.0)(rng));
        std::normal_distribution<double> e(loc, scale);
        std::vector<double> xs;
        for (int i = 0; i < n; ++i) {
            xs.push_back(e(rng));
            p.update(xs.back());
        }
        long double sum = 0;
        for (double x : xs) {
            sum += x;
        }
        const long double mu = sum / n;
        long double ss = 0;
        for (double x : xs) {
            ss += (x - mu) * (x - mu);
        }
        const double var = static_cast<double>(ss / (n - 1));
        const double mean = static_cast<double>(mu);
        worst = std::max({worst, std::abs(*p.mean() - mean) / std::max(std::abs(mean), scale),
                          std::abs(*p.variance() - var) / var});
    }
    note(o, fmt("worst moment error %.1e", worst));
    require(o, worst <= kOutburstRelative, "streaming moments differ from batch");

    double worst_hw = 0.0;
    const double t = oracle::student_t_quantile(0.975, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        OutburstProcess p(OutburstSlot{144, 10, 1});
        std::uniform_real_distribution<double> u(-100.0, 100.0);
        const double a = u(rng);
        const double b = u(rng);
        p.update(a);
        p.update(b);
        const auto f = p.predict(0.95);
        const double s2 = (a - b) * (a - b) / 2.0;
        const double want = t * std::sqrt(1.5 * s2);
        worst_hw = std::max(worst_hw, std::abs((f.upper - f.lower) / 2.0 - want) / want);
    }
    note(o, fmt("p=2 half-width error %.1e (t oracle %.6f)", worst_hw, t));
    require(o, worst_hw <= kHalfWidthRelative, "p=2 half-width differs from the t oracle");
    return o;
}

// ---- 9: alarm scenarios ----

bool has_kind(const OutputRecord& r, AlarmKind k) {
    return std::any_of(r.alarms.begin(), r.alarms.end(), [&](const Alarm& a) { return a.kind == k; });
}

Outcome alarm_scenarios() {
    Outcome o;
    constexpr std::size_t train = 5040;
    const Thresholds th{80.0, 90.0};
    std::mt19937_64 rng(9);
    std::normal_distribution<double> e(0.0, 1.0);

    // Flat training, then quiet, a spike episode, quiet, and a ramp through W and C.
    std::vector<double> x;
    for (std::size_t i = 0; i < train; ++i) {
        x.push_back(50.0 + e(rng));
    }
    constexpr int episode_from = 200;
    constexpr int episode_to = 220;
    constexpr int ramp_from = 420;
    for (int k = 0; k < 900; ++k) {
        double v = 50.0 + e(rng);
        if (k >= episode_from && k < episode_to && k % 2 == 0) {
            v += 15.0;
        }
        if (k >= ramp_from) {
            v += 0.1 * (k - ramp_from);
        }
        x.push_back(v);
    }
    auto m = SeriesModel::fit("fig", window_of(x, train), th, Config{});
    std::optional<int> anomaly_in_episode;
    std::optional<int> warn_short;
    std::optional<int> crit_short;
    std::optional<int> touch_w;
    std::optional<int> touch_c;
    for (std::size_t i = train; i < x.size(); ++i) {
        const int k = static_cast<int>(i - train);
        const auto rec = m.step({"fig", static_cast<std::int64_t>(i) * 600, x[i]});
        if (k >= episode_from && k < episode_to + 10 && has_kind(rec, AlarmKind::anomaly) && !anomaly_in_episode) {
            anomaly_in_episode = k;
        }
        if (!warn_short && has_kind(rec, AlarmKind::warning_short)) {
            warn_short = k;
        }
        if (!crit_short && has_kind(rec, AlarmKind::critical_short)) {
            crit_short = k;
        }
        if (!touch_w && x[i] >= th.warning) {
            touch_w = k;
        }
        if (!touch_c && x[i] >= th.critical) {
            touch_c = k;
        }
    }
    note(o, fmt("episode anomaly at %d; warning_short %d vs touch W %d; critical_short %d vs touch C %d",
                anomaly_in_episode.value_or(-1), warn_short.value_or(-1), touch_w.value_or(-1),
                crit_short.value_or(-1), touch_c.value_or(-1)));
    require(o, anomaly_in_episode.has_value(), "no anomaly alarm during the spike episode");
    require(o, touch_w && warn_short && *warn_short < *touch_w, "warning_short not before W is touched");
    require(o, touch_c && crit_short && *crit_short < *touch_c, "critical_short not before C is touched");

    // Declining trend under the thresholds.
    std::vector<double> d;
    for (std::size_t i = 0; i < train + 2000; ++i) {
        d.push_back(75.0 - 0.004 * static_cast<double>(i) + e(rng));
    }
    auto md = SeriesModel::fit("down", window_of(d, train), th, Config{});
    int long_alarms = 0;
    for (std::size_t i = train; i < d.size(); ++i) {
        const auto rec = md.step({"down", static_cast<std::int64_t>(i) * 600, d[i]});
        long_alarms += has_kind(rec, AlarmKind::warning_long) + has_kind(rec, AlarmKind::critical_long);
    }
    note(o, fmt("declining fixture long-term alarms %d", long_alarms));
    require(o, long_alarms == 0, "long-term alarm on a declining trend");
    return o;
}

// ---- 10: determinism ----

struct Replay {
    std::vector<std::string> lines;
    std::vector<std::uint8_t> state;
};

Replay replay(const std::vector<std::string>& ids, const std::vector<IngestEvent>& live, unsigned workers) {
    ShardedRunner runner;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        SynthParams p;
        p.kind = i % 2 ? SynthKind::trend_seasonal_outburst : SynthKind::trend_outburst;
        p.seed = 40 + i;
        runner.add(SeriesModel::fit(ids[i], window_of(synth_values(p), 5040), Thresholds{90, 110}, Config{}));
    }
    Replay r;
    for (const auto& rec : runner.process(live, workers)) {
        r.lines.push_back(format_output(rec));
    }
    r.state = runner.save();
    return r;
}

Outcome determinism() {
    Outcome o;
    const std::vector<std::string> ids{"a", "b"};
    std::vector<std::vector<double>> cont;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        SynthParams p;
        p.kind = i % 2 ? SynthKind::trend_seasonal_outburst : SynthKind::trend_outburst;
        p.seed = 40 + i;
        p.length = 5040 + 600;
        cont.push_back(synth_values(p));
    }
    std::vector<IngestEvent> mixed;
    std::vector<std::vector<IngestEvent>> alone(ids.size());
    for (std::size_t t = 5040; t < 5640; ++t) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            IngestEvent ev{ids[i], static_cast<std::int64_t>(t) * 600, cont[i][t]};
            mixed.push_back(ev);
            alone[i].push_back(ev);
        }
    }
    const auto first = replay(ids, mixed, 1);
    const auto second = replay(ids, mixed, 1);
    const auto parallel = replay(ids, mixed, 4);
    require(o, first.lines == second.lines && first.state == second.state, "replays differ");
    require(o, first.lines == parallel.lines && first.state == parallel.state, "worker count changes output");

    std::size_t compared = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto iso = replay(ids, alone[i], 1);
        std::vector<std::string> from_mixed;
        for (const auto& line : first.lines) {
            if (line.rfind("series=" + ids[i] + " ", 0) == 0) {
                from_mixed.push_back(line);
            }
        }
        require(o, from_mixed == iso.lines, "interleaved output differs from isolated run for " + ids[i]);
        compared += iso.lines.size();
    }
    note(o, fmt("%zu lines byte-identical across replays and 1/4 workers; %zu isolated lines match", first.lines.size(),
                compared));
    return o;
}

struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {"c01a", "bench within 10x above reference, seasonal >= 10x linear", bench_upper},
        {"c01b", "bench within 10x below reference", bench_lower},
        {"c02", "snapshot size constant and bounded", memory_contract},
        {"c03", "one-step 95% interval coverage", interval_coverage},
        {"c04", "seasonality and outburst identification", identification},
        {"c05", "markov chain correctness", markov_correctness},
        {"c06", "crossing times match brute-force scans", crossing_times},
        {"c07", "filter matches dense oracle", filter_correctness},
        {"c08", "outburst statistics", outburst_statistics},
        {"c09", "end-to-end alarm scenarios", alarm_scenarios},
        {"c10", "determinism and isolation", determinism},
    };
    return all;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"netcast acceptance checks"};
    std::string only;
    app.add_option("--criterion", only, "run a single criterion (c01a .. c10)");
    CLI11_PARSE(app, argc, argv);

    int failed = 0;
    bool matched = false;
    for (const auto& c : criteria()) {
        if (!only.empty() && only != c.id) {
            continue;
        }
        matched = true;
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %s %s: %s\n", out.pass ? "PASS" : "FAIL", c.id, c.title, out.detail.c_str());
        std::fflush(stdout);
        failed += out.pass ? 0 : 1;
    }
    if (!matched) {
        std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
        return 2;
    }
    return failed == 0 ? 0 : 1;
}
