#include "netcast/runner.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <thread>

#include "netcast/errors.hpp"
#include "netcast/serialize.hpp"

namespace netcast {

namespace {

constexpr char kBundleMagic[] = "NCSB";
constexpr std::uint16_t kBundleVersion = 1;

OutputRecord rejected(const IngestEvent& ev, const std::string& code) {
    OutputRecord rec;
    rec.series_id = ev.series_id;
    rec.timestamp = ev.timestamp;
    rec.value = ev.value;
    rec.flags.push_back("rejected:" + code);
    return rec;
}

} // namespace

unsigned workers_from_env(unsigned fallback) {
    const char* env = std::getenv("NETCAST_WORKERS");
    if (env == nullptr) {
        return fallback;
    }
    unsigned n = 0;
    const char* end = env + std::strlen(env);
    const auto [ptr, ec] = std::from_chars(env, end, n);
    if (ec != std::errc() || ptr != end || n == 0) {
        return fallback;
    }
    return n;
}

unsigned shard_of(const std::string& series_id, unsigned workers) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(series_id.data());
    return static_cast<unsigned>(wire::fnv1a({p, series_id.size()}) % std::max(1u, workers));
}

void ShardedRunner::add(SeriesModel model) {
    std::string id = model.series_id();
    models_.insert_or_assign(std::move(id), std::move(model));
}

std::vector<OutputRecord> ShardedRunner::process(std::span<const IngestEvent> events, unsigned workers) {
    workers = std::max(1u, workers);
    std::vector<OutputRecord> out(events.size());

    auto run_shard = [&](unsigned shard) {
        for (std::size_t i = 0; i < events.size(); ++i) {
            const auto& ev = events[i];
            if (workers > 1 && shard_of(ev.series_id, workers) != shard) {
                continue;
            }
            auto it = models_.find(ev.series_id);
            if (it == models_.end()) {
                out[i] = rejected(ev, "unknown-series");
                continue;
            }
            try {
                out[i] = it->second.step(ev);
            } catch (const RejectedEvent& e) {
                out[i] = rejected(ev, e.code());
            }
        }
    };

    if (workers == 1) {
        run_shard(0);
        return out;
    }
    // The map itself is only read here; each model is touched by one shard.
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    run_shard(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

std::vector<std::uint8_t> ShardedRunner::save() const {
    wire::ByteWriter w;
    w.u32(static_cast<std::uint32_t>(models_.size()));
    for (const auto& [id, m] : models_) {
        const auto bytes = m.serialize();
        w.u32(static_cast<std::uint32_t>(bytes.size()));
        w.bytes(bytes);
    }
    return wire::seal(std::string_view(kBundleMagic, 4), kBundleVersion, w);
}

ShardedRunner ShardedRunner::load(std::span<const std::uint8_t> bytes) {
    wire::ByteReader r(wire::unseal(bytes, std::string_view(kBundleMagic, 4), kBundleVersion));
    ShardedRunner runner;
    const std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        runner.add(SeriesModel::deserialize(r.bytes(r.u32())));
    }
    if (!r.done()) {
        throw DecodeError("trailing bytes in model bundle");
    }
    return runner;
}

} // namespace netcast
