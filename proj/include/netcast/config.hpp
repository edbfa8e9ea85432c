#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "netcast/markov.hpp"

namespace netcast {

/// Tunables for identification, fitting, forecasting and alarms. Fields set
/// to 0 where noted are derived from the sampling step at fit time.
struct Config {
    double coverage = 0.95;          // predictive interval probability
    int horizon = 3;                 // short-term k
    double seasonality_ratio = 0.1;  // r, accept a period when sd/mean < r
    double outlier_sigmas = 3.0;     // gamma
    double repetition = 0.8;         // q in b_j / b > q
    int extra_states = 5;            // c in K = C + c
    int window_len = 10;
    int min_violations = 3;
    int relevance_steps = 0;         // max_j; 0 -> five hours of steps
    double mass_threshold = 0.05;
    double prior_variance = 1e7;     // A
    double discount = 0.95;          // delta
    int candidate_period = 0;        // 0 -> one day of steps
    int distinct_cap = 100;
    int stationary_cadence = 100;
    int slot_tolerance = 1;
    int min_training = 100;
    int training_weeks = 5;
    MarkovPrior markov_prior{};

    friend bool operator==(const Config&, const Config&) = default;
};

/// Throws InputError naming the first out-of-domain field.
void validate(const Config& cfg);

/// Copy of `cfg` with the step-dependent zero fields filled in.
[[nodiscard]] Config resolve_for_step(Config cfg, std::int64_t step_seconds);

/// Applies the keys present in `j` on top of `base`. Unknown keys and values
/// of the wrong type raise InputError.
[[nodiscard]] Config config_from_json(const nlohmann::json& j, Config base = {});

[[nodiscard]] nlohmann::json config_to_json(const Config& cfg);

} // namespace netcast
