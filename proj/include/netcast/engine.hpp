#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netcast/alarms.hpp"
#include "netcast/config.hpp"
#include "netcast/dlm.hpp"
#include "netcast/forecast.hpp"
#include "netcast/identify.hpp"
#include "netcast/markov.hpp"
#include "netcast/outburst.hpp"

namespace netcast {

/// Per-step discount of a seasonal block whose configured discount is
/// meant per full cycle: discount^(1/period).
[[nodiscard]] double seasonal_step_discount(double discount, int period);

struct IngestEvent {
    std::string series_id;
    std::int64_t timestamp = 0;    // epoch seconds
    std::optional<double> value;   // nullopt = missing

    friend bool operator==(const IngestEvent&, const IngestEvent&) = default;
};

/// Long-term view computed with the step: crossing horizons for continuous
/// series, stationary tail masses for discrete ones.
struct LongTermReport {
    std::optional<int> warning_horizon;
    std::optional<int> critical_horizon;
    std::optional<double> warning_mass;
    std::optional<double> critical_mass;

    friend bool operator==(const LongTermReport&, const LongTermReport&) = default;
};

struct OutputRecord {
    std::string series_id;
    std::int64_t step = -1;        // -1 for rejected events
    std::int64_t timestamp = 0;
    std::optional<double> value;
    std::optional<Forecast> one_step;
    std::vector<Forecast> forecasts;
    std::vector<Alarm> alarms;
    LongTermReport long_term;
    std::vector<std::string> flags;

    friend bool operator==(const OutputRecord&, const OutputRecord&) = default;
};

/// Per-series model: identified structure plus sufficient statistics only.
class SeriesModel {
public:
    SeriesModel() = default;

    /// Identifies the series, builds the blocks and replays the window with
    /// alarms suppressed. Step i of the window is at start_time + i * h.
    static SeriesModel fit(std::string series_id, const TrainingWindow& w,
                           const std::optional<Thresholds>& thresholds, const Config& cfg);

    /// Fresh model from a known blueprint without any training replay.
    static SeriesModel from_blueprint(std::string series_id, const Blueprint& bp, std::int64_t step_seconds,
                                      std::int64_t start_time, const std::optional<Thresholds>& thresholds,
                                      const Config& cfg);

    /// Applies one event. Throws RejectedEvent for another series, a
    /// timestamp before the last one or a step already processed.
    OutputRecord step(const IngestEvent& ev);

    /// Applies `value` at the next step index without any forecasting or
    /// alarm work (used to warm a model).
    void warm(std::optional<double> value);

    /// Forecasts for horizons 1..k from the current state, outburst slots
    /// spliced in for continuous series.
    [[nodiscard]] std::vector<Forecast> predict(int k) const;

    [[nodiscard]] LongTermReport long_term() const;

    [[nodiscard]] std::vector<std::uint8_t> serialize() const;
    static SeriesModel deserialize(std::span<const std::uint8_t> bytes);

    [[nodiscard]] const std::string& series_id() const { return id_; }
    [[nodiscard]] const Blueprint& blueprint() const { return bp_; }
    [[nodiscard]] const Config& config() const { return cfg_; }
    [[nodiscard]] const std::optional<Thresholds>& thresholds() const { return th_; }
    [[nodiscard]] const std::optional<DlmModel>& dlm() const { return dlm_; }
    [[nodiscard]] const std::vector<OutburstProcess>& outbursts() const { return procs_; }
    [[nodiscard]] const std::optional<MarkovChain>& markov() const { return chain_; }
    [[nodiscard]] const ViolationWindow& violation_window() const { return window_; }
    [[nodiscard]] std::int64_t step_seconds() const { return step_seconds_; }
    [[nodiscard]] std::int64_t start_time() const { return start_time_; }
    /// Index of the last processed step, -1 before any.
    [[nodiscard]] std::int64_t step_index() const { return last_step_; }
    /// Alarms are withheld for steps before this index.
    [[nodiscard]] std::int64_t alarms_from() const { return alarms_from_; }

    /// Summary such as "trend + seasonal(144) + outburst(period 144, offset 12)".
    [[nodiscard]] std::string describe() const;

private:
    OutputRecord ingest(std::int64_t step, std::optional<double> x, bool full);
    void ingest_continuous(std::int64_t step, double x, bool full, OutputRecord& rec);
    void ingest_discrete(std::int64_t step, double x, bool full, OutputRecord& rec);
    void missing(std::int64_t step);
    OutburstProcess* route(std::int64_t step, double x, std::size_t& which);
    [[nodiscard]] std::vector<Forecast> predict_continuous(int k) const;
    [[nodiscard]] std::vector<Forecast> predict_discrete(int k) const;
    [[nodiscard]] LongTermReport crossing_report() const;

    std::string id_;
    Blueprint bp_;
    Config cfg_;
    std::optional<Thresholds> th_;
    std::int64_t step_seconds_ = 600;
    std::int64_t start_time_ = 0;
    std::int64_t last_step_ = -1;
    std::int64_t last_timestamp_ = 0;
    std::int64_t alarms_from_ = 0;
    std::optional<DlmModel> dlm_;
    std::vector<OutburstProcess> procs_;
    std::vector<std::int64_t> claimed_; // last period index claimed per process
    std::optional<MarkovChain> chain_;
    ViolationWindow window_;
};

} // namespace netcast
