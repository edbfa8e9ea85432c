#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "netcast/engine.hpp"

namespace netcast {

/// Worker count from NETCAST_WORKERS, or `fallback` when unset or invalid.
[[nodiscard]] unsigned workers_from_env(unsigned fallback = 1);

/// Shard of a series id among `workers` shards (stable FNV-1a hash).
[[nodiscard]] unsigned shard_of(const std::string& series_id, unsigned workers);

/// Set of series models driven by a sharded worker pool. Each series lives in
/// exactly one shard and is stepped by one thread, in input order; outputs
/// come back in input order, so results never depend on the worker count.
class ShardedRunner {
public:
    void add(SeriesModel model);
    [[nodiscard]] bool contains(const std::string& series_id) const { return models_.count(series_id) != 0; }
    [[nodiscard]] const SeriesModel& at(const std::string& series_id) const { return models_.at(series_id); }
    [[nodiscard]] const std::map<std::string, SeriesModel>& models() const { return models_; }
    [[nodiscard]] std::size_t size() const { return models_.size(); }

    /// Steps every event. Rejected events (unknown series, out of order, ...)
    /// produce a record with step -1 and a "rejected:<code>" flag.
    std::vector<OutputRecord> process(std::span<const IngestEvent> events, unsigned workers = 1);

    /// Snapshot of all models: "NCSB" bundle of per-model snapshots.
    [[nodiscard]] std::vector<std::uint8_t> save() const;
    static ShardedRunner load(std::span<const std::uint8_t> bytes);

private:
    std::map<std::string, SeriesModel> models_;
};

} // namespace netcast
