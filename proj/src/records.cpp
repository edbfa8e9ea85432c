#include "netcast/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "netcast/errors.hpp"

namespace netcast {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InputError("not an integer: '" + std::string(s) + "'");
    }
    return v;
}

void check_series_id(std::string_view id) {
    if (id.empty()) {
        throw InputError("empty series id");
    }
    for (char c : id) {
        if (c == ',' || c == '=' || c == ' ' || c == '\t' || c == ';' || c == ':') {
            throw InputError("series id '" + std::string(id) + "' contains a reserved character");
        }
    }
}

std::string opt_number(const std::optional<double>& v) {
    return v ? format_number(*v) : "-";
}

std::optional<double> parse_opt_number(std::string_view s) {
    if (s == "-") {
        return std::nullopt;
    }
    return parse_number(s);
}

std::string opt_int(const std::optional<int>& v) {
    return v ? std::to_string(*v) : "-";
}

std::optional<int> parse_opt_int(std::string_view s) {
    if (s == "-") {
        return std::nullopt;
    }
    return static_cast<int>(parse_int(s));
}

std::string format_forecast(const Forecast& f) {
    std::string s = std::to_string(f.horizon);
    s += ':';
    s += to_string(f.source);
    for (double v : {f.point, f.variance, f.lower, f.upper, f.coverage}) {
        s += ':';
        s += format_number(v);
    }
    return s;
}

ForecastSource parse_source(std::string_view s) {
    for (auto src : {ForecastSource::dlm, ForecastSource::outburst, ForecastSource::markov}) {
        if (to_string(src) == s) {
            return src;
        }
    }
    throw InputError("unknown forecast source '" + std::string(s) + "'");
}

Forecast parse_forecast(std::string_view s) {
    const auto p = split(s, ':');
    if (p.size() != 7) {
        throw InputError("forecast needs 7 fields: '" + std::string(s) + "'");
    }
    Forecast f;
    f.horizon = static_cast<int>(parse_int(p[0]));
    f.source = parse_source(p[1]);
    f.point = parse_number(p[2]);
    f.variance = parse_number(p[3]);
    f.lower = parse_number(p[4]);
    f.upper = parse_number(p[5]);
    f.coverage = parse_number(p[6]);
    return f;
}

template <typename T, typename Fn>
std::string join(const std::vector<T>& items, char sep, Fn fn) {
    if (items.empty()) {
        return "-";
    }
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            s += sep;
        }
        s += fn(items[i]);
    }
    return s;
}

} // namespace

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, ptr};
}

double parse_number(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw InputError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

std::optional<IngestEvent> parse_ingest_line(std::string_view line) {
    line = trim(line);
    if (line.empty() || line.front() == '#') {
        return std::nullopt;
    }
    const auto p = split(line, ',');
    if (p.size() != 3) {
        throw InputError("expected 'series_id,timestamp,value': '" + std::string(line) + "'");
    }
    IngestEvent ev;
    const auto id = trim(p[0]);
    check_series_id(id);
    ev.series_id = std::string(id);
    ev.timestamp = parse_int(trim(p[1]));
    const auto v = trim(p[2]);
    if (!v.empty()) {
        ev.value = parse_number(v);
    }
    return ev;
}

std::string format_ingest_line(const IngestEvent& ev) {
    std::string s = ev.series_id;
    s += ',';
    s += std::to_string(ev.timestamp);
    s += ',';
    if (ev.value) {
        s += format_number(*ev.value);
    }
    return s;
}

std::string format_output(const OutputRecord& rec) {
    std::string s = "series=" + rec.series_id;
    s += " step=" + std::to_string(rec.step);
    s += " t=" + std::to_string(rec.timestamp);
    s += " x=" + opt_number(rec.value);
    s += " f1=" + (rec.one_step ? format_forecast(*rec.one_step) : std::string("-"));
    s += " fk=" + join(rec.forecasts, ';', format_forecast);
    s += " alarms=" + join(rec.alarms, ',', [](const Alarm& a) {
             return std::string(to_string(a.kind)) + ':' + std::to_string(a.at_step) + ':' + opt_int(a.horizon) +
                    ':' + std::to_string(a.intensity);
         });
    const auto& lt = rec.long_term;
    s += " lt=" + opt_int(lt.warning_horizon) + ':' + opt_int(lt.critical_horizon) + ':' +
         opt_number(lt.warning_mass) + ':' + opt_number(lt.critical_mass);
    s += " flags=" + join(rec.flags, ',', [](const std::string& f) { return f; });
    return s;
}

OutputRecord parse_output(std::string_view line) {
    line = trim(line);
    const auto parts = split(line, ' ');
    static constexpr std::string_view keys[] = {"series", "step", "t", "x", "f1", "fk", "alarms", "lt", "flags"};
    if (parts.size() != std::size(keys)) {
        throw InputError("output record needs " + std::to_string(std::size(keys)) + " fields");
    }
    std::string_view v[std::size(keys)];
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string_view::npos || parts[i].substr(0, eq) != keys[i]) {
            throw InputError("expected key '" + std::string(keys[i]) + "'");
        }
        v[i] = parts[i].substr(eq + 1);
    }
    OutputRecord rec;
    check_series_id(v[0]);
    rec.series_id = std::string(v[0]);
    rec.step = parse_int(v[1]);
    rec.timestamp = parse_int(v[2]);
    rec.value = parse_opt_number(v[3]);
    if (v[4] != "-") {
        rec.one_step = parse_forecast(v[4]);
    }
    if (v[5] != "-") {
        for (auto tok : split(v[5], ';')) {
            rec.forecasts.push_back(parse_forecast(tok));
        }
    }
    if (v[6] != "-") {
        for (auto tok : split(v[6], ',')) {
            const auto p = split(tok, ':');
            if (p.size() != 4) {
                throw InputError("alarm needs 4 fields: '" + std::string(tok) + "'");
            }
            const auto kind = parse_alarm_kind(p[0]);
            if (!kind) {
                throw InputError("unknown alarm kind '" + std::string(p[0]) + "'");
            }
            rec.alarms.push_back(Alarm{*kind, parse_int(p[1]), parse_opt_int(p[2]), static_cast<int>(parse_int(p[3]))});
        }
    }
    const auto lt = split(v[7], ':');
    if (lt.size() != 4) {
        throw InputError("long-term report needs 4 fields");
    }
    rec.long_term.warning_horizon = parse_opt_int(lt[0]);
    rec.long_term.critical_horizon = parse_opt_int(lt[1]);
    rec.long_term.warning_mass = parse_opt_number(lt[2]);
    rec.long_term.critical_mass = parse_opt_number(lt[3]);
    if (v[8] != "-") {
        for (auto tok : split(v[8], ',')) {
            rec.flags.emplace_back(tok);
        }
    }
    return rec;
}

std::map<std::string, TrainingWindow> windows_from_events(const std::vector<IngestEvent>& events, std::int64_t h,
                                                          std::int64_t max_steps) {
    if (h <= 0) {
        throw InputError("step seconds must be positive");
    }
    std::map<std::string, std::vector<const IngestEvent*>> by_series;
    for (const auto& ev : events) {
        by_series[ev.series_id].push_back(&ev);
    }
    std::map<std::string, TrainingWindow> out;
    for (const auto& [id, evs] : by_series) {
        const std::int64_t start = evs.front()->timestamp;
        std::vector<double> values;
        std::int64_t prev_t = start;
        for (const auto* ev : evs) {
            if (ev->timestamp < prev_t) {
                throw InputError("series '" + id + "': timestamps go backwards at " + std::to_string(ev->timestamp));
            }
            prev_t = ev->timestamp;
            const std::int64_t d = ev->timestamp - start;
            const auto idx = static_cast<std::size_t>((2 * d + h) / (2 * h));
            if (idx < values.size()) {
                throw InputError("series '" + id + "': two samples map to step " + std::to_string(idx));
            }
            values.resize(idx + 1, kMissing);
            values[idx] = ev->value && std::isfinite(*ev->value) ? *ev->value : kMissing;
        }
        TrainingWindow w;
        w.step_seconds = h;
        w.start_time = start;
        if (max_steps > 0 && static_cast<std::int64_t>(values.size()) > max_steps) {
            const std::size_t drop = values.size() - static_cast<std::size_t>(max_steps);
            w.start_time = start + static_cast<std::int64_t>(drop) * h;
            values.erase(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(drop));
        }
        w.values = std::move(values);
        out.emplace(id, std::move(w));
    }
    return out;
}

std::map<std::string, Thresholds> parse_thresholds(std::string_view text) {
    std::map<std::string, Thresholds> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        const auto line = trim(text.substr(start, end - start));
        start = end + 1;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto p = split(line, ',');
        if (p.size() != 3) {
            throw InputError("expected 'series_id,warning,critical': '" + std::string(line) + "'");
        }
        const auto id = trim(p[0]);
        check_series_id(id);
        Thresholds th{parse_number(trim(p[1])), parse_number(trim(p[2]))};
        validate(th);
        out[std::string(id)] = th;
    }
    return out;
}

} // namespace netcast
