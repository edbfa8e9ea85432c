#include "netcast/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "netcast/errors.hpp"
#include "netcast/serialize.hpp"

namespace netcast {

namespace {

constexpr char kMagic[] = "NCSM";
constexpr std::uint16_t kVersion = 1;
constexpr std::int64_t kMaxGapSteps = 100000;

enum Tag : std::uint16_t {
    tag_identity = 1,
    tag_clock = 2,
    tag_config = 3,
    tag_thresholds = 4,
    tag_blueprint = 5,
    tag_dlm = 6,
    tag_outbursts = 7,
    tag_markov = 8,
    tag_window = 9,
};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    const std::int64_t q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

// Period index shared by every step of one tolerance window.
std::int64_t cycle_of(const OutburstSlot& s, std::int64_t step) {
    return floor_div(step - s.offset + s.tolerance, s.period);
}

void put_config(wire::ByteWriter& w, const Config& c) {
    w.f64(c.coverage);
    w.i32(c.horizon);
    w.f64(c.seasonality_ratio);
    w.f64(c.outlier_sigmas);
    w.f64(c.repetition);
    w.i32(c.extra_states);
    w.i32(c.window_len);
    w.i32(c.min_violations);
    w.i32(c.relevance_steps);
    w.f64(c.mass_threshold);
    w.f64(c.prior_variance);
    w.f64(c.discount);
    w.i32(c.candidate_period);
    w.i32(c.distinct_cap);
    w.i32(c.stationary_cadence);
    w.i32(c.slot_tolerance);
    w.i32(c.min_training);
    w.i32(c.training_weeks);
    w.f64(c.markov_prior.alpha);
    w.f64(c.markov_prior.beta);
    w.f64(c.markov_prior.gamma);
}

Config get_config(wire::ByteReader& r) {
    Config c;
    c.coverage = r.f64();
    c.horizon = r.i32();
    c.seasonality_ratio = r.f64();
    c.outlier_sigmas = r.f64();
    c.repetition = r.f64();
    c.extra_states = r.i32();
    c.window_len = r.i32();
    c.min_violations = r.i32();
    c.relevance_steps = r.i32();
    c.mass_threshold = r.f64();
    c.prior_variance = r.f64();
    c.discount = r.f64();
    c.candidate_period = r.i32();
    c.distinct_cap = r.i32();
    c.stationary_cadence = r.i32();
    c.slot_tolerance = r.i32();
    c.min_training = r.i32();
    c.training_weeks = r.i32();
    c.markov_prior.alpha = r.f64();
    c.markov_prior.beta = r.f64();
    c.markov_prior.gamma = r.f64();
    return c;
}

void put_slot(wire::ByteWriter& w, const OutburstSlot& s) {
    w.i32(s.period);
    w.i32(s.offset);
    w.i32(s.tolerance);
}

OutburstSlot get_slot(wire::ByteReader& r) {
    OutburstSlot s;
    s.period = r.i32();
    s.offset = r.i32();
    s.tolerance = r.i32();
    return s;
}

std::vector<DlmBlock> make_blocks(const Blueprint& bp, const Config& cfg) {
    std::vector<DlmBlock> blocks{make_trend_block(cfg.prior_variance, cfg.discount)};
    if (bp.seasonal_period) {
        // The discount applies per full cycle; one step of a long period
        // discounted at the full rate makes the covariance diverge.
        const int s = *bp.seasonal_period;
        blocks.push_back(make_seasonal_block(s, cfg.prior_variance, seasonal_step_discount(cfg.discount, s)));
    }
    return blocks;
}

void push_long_alarm(OutputRecord& rec, AlarmKind kind, std::optional<int> horizon) {
    if (horizon) {
        rec.alarms.push_back(Alarm{kind, rec.step, horizon, 1});
    }
}

} // namespace

double seasonal_step_discount(double discount, int period) {
    return std::pow(discount, 1.0 / static_cast<double>(period));
}

SeriesModel SeriesModel::from_blueprint(std::string series_id, const Blueprint& bp, std::int64_t step_seconds,
                                        std::int64_t start_time, const std::optional<Thresholds>& thresholds,
                                        const Config& cfg) {
    validate(cfg);
    if (thresholds) {
        validate(*thresholds);
    }
    SeriesModel m;
    m.id_ = std::move(series_id);
    m.bp_ = bp;
    m.cfg_ = resolve_for_step(cfg, step_seconds);
    m.th_ = thresholds;
    m.step_seconds_ = step_seconds;
    m.start_time_ = start_time;
    m.last_timestamp_ = start_time - step_seconds;
    m.window_ = ViolationWindow(m.cfg_.window_len, m.cfg_.min_violations);
    if (bp.kind == SeriesKind::continuous) {
        m.dlm_.emplace(make_blocks(bp, m.cfg_), m.cfg_.coverage);
        for (const auto& slot : bp.outburst_slots) {
            m.procs_.emplace_back(slot);
            m.claimed_.push_back(std::numeric_limits<std::int64_t>::min());
        }
    } else {
        if (!bp.states) {
            throw InputError("discrete blueprint without a state count");
        }
        m.chain_.emplace(*bp.states, m.cfg_.markov_prior);
    }
    return m;
}

SeriesModel SeriesModel::fit(std::string series_id, const TrainingWindow& w,
                             const std::optional<Thresholds>& thresholds, const Config& cfg) {
    const Blueprint bp = build_blueprint(w, cfg, thresholds);
    SeriesModel m = from_blueprint(std::move(series_id), bp, w.step_seconds, w.start_time, thresholds, cfg);
    for (double v : w.values) {
        m.warm(std::isnan(v) ? std::nullopt : std::optional<double>(v));
    }
    m.alarms_from_ = m.last_step_ + 1 + bp.seasonal_period.value_or(0);
    return m;
}

void SeriesModel::warm(std::optional<double> value) {
    const std::int64_t s = last_step_ + 1;
    ingest(s, value, false);
    last_timestamp_ = start_time_ + s * step_seconds_;
}

OutputRecord SeriesModel::step(const IngestEvent& ev) {
    if (ev.series_id != id_) {
        throw RejectedEvent("foreign-series", "event for series '" + ev.series_id + "' sent to model '" + id_ + "'");
    }
    if (ev.timestamp < last_timestamp_) {
        throw RejectedEvent("out-of-order", "out-of-order timestamp " + std::to_string(ev.timestamp));
    }
    const std::int64_t offset = ev.timestamp - start_time_;
    const std::int64_t s = floor_div(2 * offset + step_seconds_, 2 * step_seconds_);
    if (s <= last_step_) {
        throw RejectedEvent("duplicate-step", "step " + std::to_string(s) + " already processed");
    }
    const std::int64_t gap = s - last_step_ - 1;
    if (gap > kMaxGapSteps) {
        throw RejectedEvent("gap-too-large", "gap of " + std::to_string(gap) + " steps exceeds the limit; refit the series");
    }
    for (std::int64_t g = last_step_ + 1; g < s; ++g) {
        missing(g);
        last_step_ = g;
    }
    OutputRecord rec = ingest(s, ev.value, true);
    rec.timestamp = ev.timestamp;
    last_timestamp_ = ev.timestamp;
    if (gap > 0) {
        rec.flags.insert(rec.flags.begin(), "gap:" + std::to_string(gap));
    }
    if (2 * std::abs(offset - s * step_seconds_) >= step_seconds_) {
        rec.flags.push_back("drift");
    }
    return rec;
}

void SeriesModel::missing(std::int64_t) {
    if (dlm_) {
        dlm_->update_missing();
    }
}

OutputRecord SeriesModel::ingest(std::int64_t step, std::optional<double> x, bool full) {
    OutputRecord rec;
    rec.series_id = id_;
    rec.step = step;
    rec.timestamp = start_time_ + step * step_seconds_;
    if (x && !std::isfinite(*x)) {
        rec.flags.emplace_back("nonfinite");
        x.reset();
    }
    rec.value = x;
    if (!x) {
        missing(step);
        if (full) {
            rec.flags.emplace_back("missing");
        }
    } else if (dlm_) {
        ingest_continuous(step, *x, full, rec);
    } else {
        ingest_discrete(step, *x, full, rec);
    }
    last_step_ = step;
    if (!full) {
        return rec;
    }

    const bool emit = step >= alarms_from_;
    if (!emit) {
        rec.alarms.clear();
    }
    if (dlm_ || chain_->last_state()) {
        rec.forecasts = predict(cfg_.horizon);
    }
    if (!th_) {
        return rec;
    }
    if (emit) {
        for (const auto& a : check_threshold_short(rec.forecasts, *th_, step)) {
            rec.alarms.push_back(a);
        }
    }
    if (dlm_) {
        rec.long_term = crossing_report();
        if (emit) {
            push_long_alarm(rec, AlarmKind::warning_long, rec.long_term.warning_horizon);
            push_long_alarm(rec, AlarmKind::critical_long, rec.long_term.critical_horizon);
        }
    } else if (step % cfg_.stationary_cadence == 0) {
        const auto pi = chain_->stationary();
        rec.long_term.warning_mass = tail_mass(pi, th_->warning);
        rec.long_term.critical_mass = tail_mass(pi, th_->critical);
        if (emit) {
            for (const auto& a : check_long_term_discrete(pi, *th_, cfg_.mass_threshold, step)) {
                rec.alarms.push_back(a);
            }
        }
    }
    return rec;
}

OutburstProcess* SeriesModel::route(std::int64_t step, double x, std::size_t& which) {
    std::optional<Forecast> dlm_fc;
    for (std::size_t i = 0; i < procs_.size(); ++i) {
        auto& p = procs_[i];
        if (!p.is_outburst_time(step) || claimed_[i] == cycle_of(p.slot(), step)) {
            continue;
        }
        bool claim = p.slot().distance(step) == 0;
        if (!claim) {
            // Off the exact slot only a value the DLM cannot explain, and
            // that looks like this process once it has a predictive.
            if (!dlm_fc) {
                dlm_fc = dlm_->one_step();
            }
            claim = !dlm_fc->contains(x) && (p.count() < 2 || p.predict(cfg_.coverage).contains(x));
        }
        if (claim) {
            which = i;
            return &p;
        }
    }
    return nullptr;
}

void SeriesModel::ingest_continuous(std::int64_t step, double x, bool full, OutputRecord& rec) {
    std::size_t which = 0;
    std::optional<Forecast> fc;
    if (OutburstProcess* p = route(step, x, which)) {
        if (p->count() >= 2) {
            fc = p->predict(cfg_.coverage, 1);
        }
        dlm_->update_missing();
        p->update(x);
        claimed_[which] = cycle_of(p->slot(), step);
        if (full) {
            rec.flags.emplace_back("outburst");
        }
    } else {
        fc = dlm_->filter_update(x);
    }
    if (fc) {
        if (auto a = check_anomaly(x, *fc, window_, step)) {
            rec.alarms.push_back(*a);
        }
    }
    rec.one_step = fc;
}

void SeriesModel::ingest_discrete(std::int64_t step, double x, bool full, OutputRecord& rec) {
    const int K = chain_->states();
    const double r = std::round(x);
    const int state = static_cast<int>(std::clamp(r, 1.0, static_cast<double>(K)));
    if (full && static_cast<double>(state) != x) {
        rec.flags.emplace_back(r != x ? "rounded" : "clamped");
    }
    if (auto last = chain_->last_state()) {
        const auto probs = chain_->predict_next();
        const auto iv = expand_interval(probs, *last, cfg_.coverage);
        const Forecast fc{1,
                          expected_state(probs),
                          state_variance(probs),
                          static_cast<double>(iv.lower),
                          static_cast<double>(iv.upper),
                          cfg_.coverage,
                          ForecastSource::markov};
        if (auto a = check_anomaly(static_cast<double>(state), fc, window_, step)) {
            rec.alarms.push_back(*a);
        }
        rec.one_step = fc;
    }
    chain_->update(state);
}

std::vector<Forecast> SeriesModel::predict(int k) const {
    if (k < 1) {
        throw InputError("forecast horizon must be >= 1");
    }
    return dlm_ ? predict_continuous(k) : predict_discrete(k);
}

std::vector<Forecast> SeriesModel::predict_continuous(int k) const {
    const auto base = dlm_->predict_k(k);
    std::vector<Forecast> out;
    out.reserve(base.size());
    for (int j = 1; j <= k; ++j) {
        const std::int64_t s = last_step_ + j;
        const OutburstProcess* hit = nullptr;
        for (const auto& p : procs_) {
            if (p.slot().distance(s) == 0) {
                hit = &p;
                break;
            }
        }
        if (!hit) {
            out.push_back(base[static_cast<std::size_t>(j - 1)]);
        } else if (hit->count() >= 2) {
            out.push_back(hit->predict(cfg_.coverage, j));
        }
    }
    return out;
}

std::vector<Forecast> SeriesModel::predict_discrete(int k) const {
    const int last = chain_->last_state().value_or(0);
    if (last == 0) {
        throw InsufficientData("no state observed yet");
    }
    const auto path = chain_->predict_path(k);
    std::vector<Forecast> out;
    out.reserve(path.size());
    for (int j = 1; j <= k; ++j) {
        const auto& probs = path[static_cast<std::size_t>(j - 1)];
        const auto iv = expand_interval(probs, last, cfg_.coverage);
        out.push_back(Forecast{j, expected_state(probs), state_variance(probs), static_cast<double>(iv.lower),
                               static_cast<double>(iv.upper), cfg_.coverage, ForecastSource::markov});
    }
    return out;
}

LongTermReport SeriesModel::crossing_report() const {
    LongTermReport rep;
    const auto tr = dlm_->trend();
    if (!th_ || !tr) {
        return rep;
    }
    const auto cycle = dlm_->seasonal_cycle();
    const int max_j = cfg_.relevance_steps;
    auto cross = [&](double level) {
        return cycle ? crossing_time_combined(tr->level, tr->slope, *cycle, level, max_j)
                     : crossing_time_linear(tr->level, tr->slope, level, max_j);
    };
    rep.warning_horizon = cross(th_->warning);
    rep.critical_horizon = cross(th_->critical);
    return rep;
}

LongTermReport SeriesModel::long_term() const {
    if (dlm_) {
        return crossing_report();
    }
    LongTermReport rep;
    if (th_) {
        const auto pi = chain_->stationary();
        rep.warning_mass = tail_mass(pi, th_->warning);
        rep.critical_mass = tail_mass(pi, th_->critical);
    }
    return rep;
}

std::string SeriesModel::describe() const {
    if (chain_) {
        return "markov K=" + std::to_string(chain_->states());
    }
    std::string s = "trend";
    if (bp_.seasonal_period) {
        s += " + seasonal(" + std::to_string(*bp_.seasonal_period) + ")";
    }
    for (const auto& slot : bp_.outburst_slots) {
        s += " + outburst(period " + std::to_string(slot.period) + ", slot " + std::to_string(slot.offset) +
             " +-" + std::to_string(slot.tolerance) + ")";
    }
    return s;
}

std::vector<std::uint8_t> SeriesModel::serialize() const {
    wire::ByteWriter fields;
    {
        wire::ByteWriter f;
        f.str(id_);
        fields.field(tag_identity, f);
    }
    {
        wire::ByteWriter f;
        f.i64(step_seconds_);
        f.i64(start_time_);
        f.i64(last_step_);
        f.i64(last_timestamp_);
        f.i64(alarms_from_);
        fields.field(tag_clock, f);
    }
    {
        wire::ByteWriter f;
        put_config(f, cfg_);
        fields.field(tag_config, f);
    }
    if (th_) {
        wire::ByteWriter f;
        f.f64(th_->warning);
        f.f64(th_->critical);
        fields.field(tag_thresholds, f);
    }
    {
        wire::ByteWriter f;
        f.u8(static_cast<std::uint8_t>(bp_.kind));
        f.i32(bp_.seasonal_period.value_or(0));
        f.i32(bp_.states.value_or(0));
        f.u32(static_cast<std::uint32_t>(bp_.outburst_slots.size()));
        for (const auto& s : bp_.outburst_slots) {
            put_slot(f, s);
        }
        fields.field(tag_blueprint, f);
    }
    if (dlm_) {
        wire::ByteWriter f;
        const auto& m = dlm_->mean();
        const auto& C = dlm_->covariance();
        f.i64(dlm_->last_update_index());
        f.f64(dlm_->coverage());
        f.f64(dlm_->observation_variance());
        f.u32(static_cast<std::uint32_t>(dlm_->blocks().size()));
        for (const auto& b : dlm_->blocks()) {
            f.u8(static_cast<std::uint8_t>(b.kind));
            f.i32(b.period);
            f.f64(b.delta);
        }
        f.u32(static_cast<std::uint32_t>(m.size()));
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            f.f64(m(i));
        }
        // Symmetric: upper triangle only.
        for (Eigen::Index i = 0; i < C.rows(); ++i) {
            for (Eigen::Index j = i; j < C.cols(); ++j) {
                f.f64(C(i, j));
            }
        }
        fields.field(tag_dlm, f);

        wire::ByteWriter o;
        o.u32(static_cast<std::uint32_t>(procs_.size()));
        for (std::size_t i = 0; i < procs_.size(); ++i) {
            put_slot(o, procs_[i].slot());
            o.i64(procs_[i].count());
            o.f64(procs_[i].mean().value_or(0.0));
            o.f64(procs_[i].sum_sq_dev());
            o.i64(claimed_[i]);
        }
        fields.field(tag_outbursts, o);
    }
    if (chain_) {
        wire::ByteWriter f;
        const auto& conc = chain_->concentration();
        f.u32(static_cast<std::uint32_t>(chain_->states()));
        f.f64(chain_->prior().alpha);
        f.f64(chain_->prior().beta);
        f.f64(chain_->prior().gamma);
        f.i32(chain_->last_state().value_or(0));
        for (Eigen::Index i = 0; i < conc.rows(); ++i) {
            for (Eigen::Index j = 0; j < conc.cols(); ++j) {
                f.f64(conc(i, j));
            }
        }
        fields.field(tag_markov, f);
    }
    {
        wire::ByteWriter f;
        const auto h = window_.history();
        f.u32(static_cast<std::uint32_t>(h.size()));
        f.u32(static_cast<std::uint32_t>(window_.min_violations()));
        for (bool b : h) {
            f.u8(b ? 1 : 0);
        }
        fields.field(tag_window, f);
    }
    return wire::seal(std::string_view(kMagic, 4), kVersion, fields);
}

SeriesModel SeriesModel::deserialize(std::span<const std::uint8_t> bytes) {
    wire::ByteReader r(wire::unseal(bytes, std::string_view(kMagic, 4), kVersion));
    SeriesModel m;
    std::uint32_t seen = 0;
    std::optional<std::vector<std::uint8_t>> dlm_payload;
    std::optional<std::vector<std::uint8_t>> proc_payload;
    std::optional<std::vector<std::uint8_t>> markov_payload;
    std::optional<std::vector<std::uint8_t>> window_payload;

    try {
        while (!r.done()) {
            const std::uint16_t tag = r.u16();
            const auto payload = r.bytes(r.u32());
            wire::ByteReader f(payload);
            switch (tag) {
            case tag_identity:
                m.id_ = f.str();
                break;
            case tag_clock:
                m.step_seconds_ = f.i64();
                m.start_time_ = f.i64();
                m.last_step_ = f.i64();
                m.last_timestamp_ = f.i64();
                m.alarms_from_ = f.i64();
                break;
            case tag_config:
                m.cfg_ = get_config(f);
                break;
            case tag_thresholds: {
                Thresholds th;
                th.warning = f.f64();
                th.critical = f.f64();
                m.th_ = th;
                break;
            }
            case tag_blueprint: {
                m.bp_.kind = static_cast<SeriesKind>(f.u8());
                if (const int s = f.i32(); s != 0) {
                    m.bp_.seasonal_period = s;
                }
                if (const int k = f.i32(); k != 0) {
                    m.bp_.states = k;
                }
                const std::uint32_t n = f.u32();
                for (std::uint32_t i = 0; i < n; ++i) {
                    m.bp_.outburst_slots.push_back(get_slot(f));
                }
                break;
            }
            case tag_dlm:
                dlm_payload.emplace(payload.begin(), payload.end());
                break;
            case tag_outbursts:
                proc_payload.emplace(payload.begin(), payload.end());
                break;
            case tag_markov:
                markov_payload.emplace(payload.begin(), payload.end());
                break;
            case tag_window:
                window_payload.emplace(payload.begin(), payload.end());
                break;
            default:
                continue; // unknown fields are skipped
            }
            if (tag < 32) {
                seen |= 1u << tag;
            }
        }

        const std::uint32_t required = (1u << tag_identity) | (1u << tag_clock) | (1u << tag_config) |
                                       (1u << tag_blueprint) | (1u << tag_window);
        if ((seen & required) != required) {
            throw DecodeError("snapshot is missing required fields");
        }
        validate(m.cfg_);
        if (m.step_seconds_ <= 0) {
            throw DecodeError("snapshot has a non-positive step");
        }

        {
            wire::ByteReader f(*window_payload);
            const std::uint32_t len = f.u32();
            const std::uint32_t minv = f.u32();
            std::vector<bool> h(len);
            for (std::uint32_t i = 0; i < len; ++i) {
                h[i] = f.u8() != 0;
            }
            m.window_ = ViolationWindow(static_cast<int>(len), static_cast<int>(minv));
            m.window_.restore(h);
        }

        if (m.bp_.kind == SeriesKind::continuous) {
            if (!dlm_payload || !proc_payload) {
                throw DecodeError("continuous snapshot without DLM state");
            }
            wire::ByteReader f(*dlm_payload);
            const std::int64_t idx = f.i64();
            const double coverage = f.f64();
            const double V = f.f64();
            const std::uint32_t nb = f.u32();
            std::vector<DlmBlock> blocks;
            for (std::uint32_t i = 0; i < nb; ++i) {
                const auto kind = static_cast<BlockKind>(f.u8());
                const int period = f.i32();
                const double delta = f.f64();
                DlmBlock b = kind == BlockKind::trend      ? make_trend_block(1.0, delta)
                             : kind == BlockKind::seasonal ? make_seasonal_block(period, 1.0, delta)
                                                           : throw DecodeError("unknown block kind");
                b.V = V;
                blocks.push_back(std::move(b));
            }
            DlmModel dlm(std::move(blocks), coverage);
            const std::uint32_t d = f.u32();
            if (static_cast<Eigen::Index>(d) != dlm.state_dim()) {
                throw DecodeError("DLM state dimension does not match its blocks");
            }
            Eigen::VectorXd mean(d);
            for (std::uint32_t i = 0; i < d; ++i) {
                mean(i) = f.f64();
            }
            Eigen::MatrixXd C(d, d);
            for (std::uint32_t i = 0; i < d; ++i) {
                for (std::uint32_t j = i; j < d; ++j) {
                    C(i, j) = C(j, i) = f.f64();
                }
            }
            dlm.set_state(std::move(mean), std::move(C), idx);
            m.dlm_ = std::move(dlm);

            wire::ByteReader o(*proc_payload);
            const std::uint32_t np = o.u32();
            for (std::uint32_t i = 0; i < np; ++i) {
                OutburstProcess p(get_slot(o));
                const std::int64_t count = o.i64();
                const double mean_p = o.f64();
                const double m2 = o.f64();
                p.restore(count, mean_p, m2);
                m.procs_.push_back(p);
                m.claimed_.push_back(o.i64());
            }
        } else {
            if (!markov_payload) {
                throw DecodeError("discrete snapshot without chain state");
            }
            wire::ByteReader f(*markov_payload);
            const int K = static_cast<int>(f.u32());
            MarkovPrior prior;
            prior.alpha = f.f64();
            prior.beta = f.f64();
            prior.gamma = f.f64();
            const int last = f.i32();
            if (K < 2 || static_cast<std::size_t>(K) * static_cast<std::size_t>(K) * 8 > f.remaining()) {
                throw DecodeError("bad Markov state count");
            }
            Eigen::MatrixXd conc(K, K);
            for (int i = 0; i < K; ++i) {
                for (int j = 0; j < K; ++j) {
                    conc(i, j) = f.f64();
                }
            }
            MarkovChain chain(K, prior);
            chain.restore(std::move(conc), last == 0 ? std::nullopt : std::optional<int>(last));
            m.chain_ = std::move(chain);
        }
    } catch (const InputError& e) {
        throw DecodeError(std::string("invalid snapshot contents: ") + e.what());
    }
    return m;
}

} // namespace netcast
