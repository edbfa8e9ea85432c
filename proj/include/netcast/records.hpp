#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netcast/alarms.hpp"
#include "netcast/engine.hpp"
#include "netcast/identify.hpp"

namespace netcast {

/// Shortest text that parses back to exactly `v`.
[[nodiscard]] std::string format_number(double v);
[[nodiscard]] double parse_number(std::string_view s);

/// "series_id,timestamp,value" with an empty value for missing. Blank lines
/// and lines starting with '#' yield nullopt. Throws InputError otherwise.
[[nodiscard]] std::optional<IngestEvent> parse_ingest_line(std::string_view line);
[[nodiscard]] std::string format_ingest_line(const IngestEvent& ev);

/// One key=value line per record:
///   series=ID step=N t=T x=V f1=FC fk=FC;FC alarms=A,A lt=W:C:WM:CM flags=F,F
/// with FC = horizon:source:point:variance:lower:upper:coverage,
/// A = kind:at_step:horizon:intensity and "-" for anything absent.
[[nodiscard]] std::string format_output(const OutputRecord& rec);
[[nodiscard]] OutputRecord parse_output(std::string_view line);

/// Groups events per series into uniformly spaced windows (step `h`
/// seconds, first event as start). Keeps at most the last `max_steps` steps
/// when max_steps > 0. Throws InputError on timestamps that go backwards.
[[nodiscard]] std::map<std::string, TrainingWindow> windows_from_events(const std::vector<IngestEvent>& events,
                                                                        std::int64_t h, std::int64_t max_steps = 0);

/// "series_id,warning,critical" lines; '#' comments allowed.
[[nodiscard]] std::map<std::string, Thresholds> parse_thresholds(std::string_view text);

} // namespace netcast
