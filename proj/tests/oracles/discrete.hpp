#pragma once

// Interval expansion and crossing-time references written as plain scans.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

namespace oracle {

struct Interval {
    int lower;
    int upper;
};

// Round r covers [max(1, state - r), min(K, state + r)]; the first round
// whose mass reaches `coverage`, or the whole range, is the answer.
inline Interval expand_by_rounds(const std::vector<double>& probs, int state, double coverage) {
    const int K = static_cast<int>(probs.size());
    for (int r = 0;; ++r) {
        const int lo = std::max(1, state - r);
        const int hi = std::min(K, state + r);
        // Mass accumulated in the same order as the expansion visits states.
        double mass = probs[static_cast<std::size_t>(state - 1)];
        for (int q = 1; q <= r; ++q) {
            if (state + q <= K) {
                mass += probs[static_cast<std::size_t>(state + q - 1)];
            }
            if (state - q >= 1) {
                mass += probs[static_cast<std::size_t>(state - q - 1)];
            }
        }
        if (mass >= coverage || (lo == 1 && hi == K)) {
            return {lo, hi};
        }
    }
}

inline std::optional<int> scan_linear(double a0, double a1, double level, int max_j) {
    if (max_j < 1) {
        return std::nullopt;
    }
    if (a0 >= level) {
        return 1;
    }
    for (int j = 1; j <= max_j; ++j) {
        if (a0 + a1 * j > level) {
            return j;
        }
    }
    return std::nullopt;
}

inline std::optional<int> scan_cycle(double a0, double a1, const std::vector<double>& cycle, double level,
                                     int max_j) {
    const int s = static_cast<int>(cycle.size());
    for (int j = 1; j <= max_j; ++j) {
        if (a0 + a1 * j + cycle[static_cast<std::size_t>(j % s)] > level) {
            return j;
        }
    }
    return std::nullopt;
}

inline std::optional<int> scan_seasonal(const std::vector<double>& cycle, double level, int max_j) {
    const int s = static_cast<int>(cycle.size());
    for (int j = 1; j <= max_j; ++j) {
        if (cycle[static_cast<std::size_t>(j % s)] > level) {
            return j;
        }
    }
    return std::nullopt;
}

} // namespace oracle
