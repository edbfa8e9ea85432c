#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netcast/bench.hpp"
#include "netcast/config.hpp"
#include "netcast/engine.hpp"
#include "netcast/errors.hpp"
#include "netcast/records.hpp"
#include "netcast/runner.hpp"
#include "netcast/synth.hpp"

using namespace netcast;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr std::size_t kChunk = 4096;

// Config overrides given on the command line, keyed like the JSON config.
struct ConfigFlags {
    std::map<std::string, std::optional<double>> reals;
    std::map<std::string, std::optional<int>> ints;
    std::string file;

    void attach(CLI::App* app) {
        app->add_option("--config", file, "JSON config file");
        for (const char* k : {"coverage", "seasonality_ratio", "outlier_sigmas", "repetition", "mass_threshold",
                              "prior_variance", "discount", "markov_alpha", "markov_beta", "markov_gamma"}) {
            app->add_option("--" + dashed(k), reals[k]);
        }
        for (const char* k : {"horizon", "extra_states", "window_len", "min_violations", "relevance_steps",
                              "candidate_period", "distinct_cap", "stationary_cadence", "slot_tolerance",
                              "min_training", "training_weeks"}) {
            app->add_option("--" + dashed(k), ints[k]);
        }
    }

    Config resolve() const {
        Config cfg;
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in) {
                throw InputError("cannot open config file '" + file + "'");
            }
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw InputError("config file '" + file + "': " + e.what());
            }
            cfg = config_from_json(j, cfg);
        }
        nlohmann::json overrides = nlohmann::json::object();
        for (const auto& [k, v] : reals) {
            if (v) {
                overrides[k] = *v;
            }
        }
        for (const auto& [k, v] : ints) {
            if (v) {
                overrides[k] = *v;
            }
        }
        cfg = config_from_json(overrides, cfg);
        validate(cfg);
        return cfg;
    }

    static std::string dashed(std::string s) {
        for (char& c : s) {
            if (c == '_') {
                c = '-';
            }
        }
        return s;
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write '" + path + "'");
        }
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw std::runtime_error("write failed for '" + path + "'");
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw std::runtime_error("cannot replace '" + path + "'");
    }
}

ShardedRunner load_state(const std::string& path) {
    const std::string raw = read_file(path);
    const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
    return ShardedRunner::load(bytes);
}

std::vector<IngestEvent> read_events(std::istream& in) {
    std::vector<IngestEvent> events;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        try {
            if (auto ev = parse_ingest_line(line)) {
                events.push_back(std::move(*ev));
            }
        } catch (const InputError& e) {
            throw InputError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return events;
}

struct FitArgs {
    std::string input;
    std::string state_out;
    std::int64_t step = 600;
    std::optional<double> warning;
    std::optional<double> critical;
    std::string thresholds_file;
    ConfigFlags cfg;
};

int cmd_fit(const FitArgs& a) {
    const Config cfg = a.cfg.resolve();
    std::ifstream in(a.input);
    if (!in) {
        throw InputError("cannot open input '" + a.input + "'");
    }
    const auto events = read_events(in);
    if (a.warning.has_value() != a.critical.has_value()) {
        throw InputError("--warning and --critical go together");
    }
    std::map<std::string, Thresholds> per_series;
    if (!a.thresholds_file.empty()) {
        per_series = parse_thresholds(read_file(a.thresholds_file));
    }
    const std::int64_t week = 7 * 86400 / a.step;
    const auto windows = windows_from_events(events, a.step, week * cfg.training_weeks);
    if (windows.empty()) {
        throw InsufficientData("input holds no observations");
    }
    ShardedRunner runner;
    for (const auto& [id, w] : windows) {
        std::optional<Thresholds> th;
        if (auto it = per_series.find(id); it != per_series.end()) {
            th = it->second;
        } else if (a.warning) {
            th = Thresholds{*a.warning, *a.critical};
        }
        SeriesModel m = SeriesModel::fit(id, w, th, cfg);
        std::cout << "series=" << id << " model=\"" << m.describe() << "\" training=" << w.values.size()
                  << " observed=" << w.observed() << " step=" << w.step_seconds << "\n";
        runner.add(std::move(m));
    }
    write_file(a.state_out, runner.save());
    return 0;
}

struct RunArgs {
    std::string state;
    std::string input = "-";
    std::string output = "-";
    std::string state_out;
    unsigned workers = 0;
};

int cmd_run(const RunArgs& a) {
    ShardedRunner runner = load_state(a.state);
    const unsigned workers = a.workers > 0 ? a.workers : workers_from_env(1);
    std::ifstream fin;
    std::istream* in = &std::cin;
    if (a.input != "-") {
        fin.open(a.input);
        if (!fin) {
            throw InputError("cannot open input '" + a.input + "'");
        }
        in = &fin;
    }
    std::ofstream fout;
    std::ostream* out = &std::cout;
    if (a.output != "-") {
        fout.open(a.output, std::ios::trunc);
        if (!fout) {
            throw std::runtime_error("cannot open output '" + a.output + "'");
        }
        out = &fout;
    }
    std::vector<IngestEvent> chunk;
    std::string line;
    std::size_t lineno = 0;
    bool any = false;
    auto flush = [&] {
        for (const auto& rec : runner.process(chunk, workers)) {
            *out << format_output(rec) << '\n';
        }
        any = any || !chunk.empty();
        chunk.clear();
    };
    while (std::getline(*in, line)) {
        ++lineno;
        try {
            if (auto ev = parse_ingest_line(line)) {
                chunk.push_back(std::move(*ev));
            }
        } catch (const InputError& e) {
            throw InputError("line " + std::to_string(lineno) + ": " + e.what());
        }
        if (chunk.size() >= kChunk) {
            flush();
        }
    }
    flush();
    out->flush();
    if (any) {
        write_file(a.state_out.empty() ? a.state : a.state_out, runner.save());
    }
    return 0;
}

int cmd_predict(const std::string& state, const std::string& series, int k) {
    const ShardedRunner runner = load_state(state);
    if (!runner.contains(series)) {
        throw InputError("no series '" + series + "' in state");
    }
    const SeriesModel& m = runner.at(series);
    OutputRecord rec;
    rec.series_id = series;
    rec.step = m.step_index();
    rec.timestamp = m.start_time() + m.step_index() * m.step_seconds();
    rec.forecasts = m.predict(k);
    rec.long_term = m.long_term();
    std::cout << format_output(rec) << "\n";
    return 0;
}

int cmd_synth(const SynthParams& p, const std::string& kind, const std::string& series, const std::string& output) {
    SynthParams q = p;
    const auto k = parse_synth_kind(kind);
    if (!k) {
        throw InputError("unknown synth kind '" + kind + "'");
    }
    q.kind = *k;
    const std::string text = synth_text(q, series);
    if (output == "-") {
        std::cout << text;
    } else {
        write_file(output, std::vector<std::uint8_t>(text.begin(), text.end()));
    }
    return 0;
}

int cmd_bench(const std::vector<std::string>& configs, std::int64_t n, std::uint64_t seed) {
    for (const auto& name : configs) {
        const auto c = parse_bench_config(name);
        if (!c) {
            throw InputError("unknown bench config '" + name + "'");
        }
        std::cout << format_bench(run_bench(*c, n, seed)) << std::endl;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"netcast: Bayesian forecasting and alarms for network time series"};
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Identify and fit one model per series in a training file");
    fit_cmd->add_option("input", fit.input, "Training data (series_id,timestamp,value)")->required();
    fit_cmd->add_option("-o,--state-out", fit.state_out, "Snapshot file to write")->required();
    fit_cmd->add_option("--step", fit.step, "Sampling step in seconds")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--warning", fit.warning, "Warning level for every series");
    fit_cmd->add_option("--critical", fit.critical, "Critical level for every series");
    fit_cmd->add_option("--thresholds", fit.thresholds_file, "Per-series levels (series_id,warning,critical)");
    fit.cfg.attach(fit_cmd);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Stream events through fitted models");
    run_cmd->add_option("-s,--state", run.state, "Snapshot file")->required();
    run_cmd->add_option("-i,--input", run.input, "Event stream, - for stdin");
    run_cmd->add_option("-o,--output", run.output, "Output records, - for stdout");
    run_cmd->add_option("--state-out", run.state_out, "Where to write the final snapshot (default: --state)");
    run_cmd->add_option("-w,--workers", run.workers, "Worker threads (default: NETCAST_WORKERS or 1)");

    std::string pstate;
    std::string pseries;
    int pk = 3;
    auto* predict_cmd = app.add_subcommand("predict", "k-step forecast from a snapshot");
    predict_cmd->add_option("-s,--state", pstate, "Snapshot file")->required();
    predict_cmd->add_option("--series", pseries, "Series id")->required();
    predict_cmd->add_option("-k", pk, "Horizon")->check(CLI::PositiveNumber);

    SynthParams sp;
    std::string skind = "trend";
    std::string sseries = "synth";
    std::string sout = "-";
    auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic series");
    synth_cmd->add_option("--kind", skind,
                          "trend | trend+seasonal | trend+outburst | trend+seasonal+outburst | discrete");
    synth_cmd->add_option("--length", sp.length);
    synth_cmd->add_option("--seed", sp.seed);
    synth_cmd->add_option("--step", sp.step_seconds)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--start", sp.start_time);
    synth_cmd->add_option("--series", sseries);
    synth_cmd->add_option("--level", sp.level);
    synth_cmd->add_option("--slope", sp.slope);
    synth_cmd->add_option("--noise", sp.noise);
    synth_cmd->add_option("--period", sp.period);
    synth_cmd->add_option("--amplitude", sp.amplitude);
    synth_cmd->add_option("--outburst-period", sp.outburst_period);
    synth_cmd->add_option("--outburst-offset", sp.outburst_offset);
    synth_cmd->add_option("--outburst-height", sp.outburst_height);
    synth_cmd->add_option("--states", sp.states);
    synth_cmd->add_option("-o,--output", sout, "Output file, - for stdout");

    std::vector<std::string> bconfigs{"linear", "seasonal", "outburst", "markov"};
    std::int64_t bn = 15000;
    std::uint64_t bseed = 1;
    auto* bench_cmd = app.add_subcommand("bench", "Per-iteration timing on the four reference configurations");
    bench_cmd->add_option("--config", bconfigs, "linear | seasonal | outburst | markov");
    bench_cmd->add_option("-n", bn)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bseed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*fit_cmd) {
            return cmd_fit(fit);
        }
        if (*run_cmd) {
            return cmd_run(run);
        }
        if (*predict_cmd) {
            return cmd_predict(pstate, pseries, pk);
        }
        if (*synth_cmd) {
            return cmd_synth(sp, skind, sseries, sout);
        }
        if (*bench_cmd) {
            return cmd_bench(bconfigs, bn, bseed);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DecodeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
