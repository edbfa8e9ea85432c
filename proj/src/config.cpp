#include "netcast/config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "netcast/errors.hpp"

namespace netcast {

namespace {

[[noreturn]] void reject(const std::string& field, const std::string& why) {
    throw InputError("config." + field + ": " + why);
}

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) {
        reject(field, why);
    }
}

} // namespace

void validate(const Config& c) {
    require(c.coverage > 0.0 && c.coverage < 1.0, "coverage", "must lie in (0, 1)");
    require(c.horizon >= 1, "horizon", "must be >= 1");
    require(c.seasonality_ratio > 0.0 && std::isfinite(c.seasonality_ratio), "seasonality_ratio", "must be > 0");
    require(c.outlier_sigmas > 0.0 && std::isfinite(c.outlier_sigmas), "outlier_sigmas", "must be > 0");
    require(c.repetition > 0.0 && c.repetition <= 1.0, "repetition", "must lie in (0, 1]");
    require(c.extra_states >= 0, "extra_states", "must be >= 0");
    require(c.window_len >= 1, "window_len", "must be >= 1");
    require(c.min_violations >= 1 && c.min_violations <= c.window_len, "min_violations",
            "must lie in 1..window_len");
    require(c.relevance_steps >= 0, "relevance_steps", "must be >= 0 (0 derives five hours of steps)");
    require(c.mass_threshold >= 0.0 && c.mass_threshold < 1.0, "mass_threshold", "must lie in [0, 1)");
    require(c.prior_variance > 0.0 && std::isfinite(c.prior_variance), "prior_variance", "must be > 0");
    require(c.discount > 0.0 && c.discount <= 1.0, "discount", "must lie in (0, 1]");
    require(c.candidate_period >= 0, "candidate_period", "must be >= 0 (0 derives one day of steps)");
    require(c.distinct_cap >= 1, "distinct_cap", "must be >= 1");
    require(c.stationary_cadence >= 1, "stationary_cadence", "must be >= 1");
    require(c.slot_tolerance >= 0, "slot_tolerance", "must be >= 0");
    require(c.min_training >= 1, "min_training", "must be >= 1");
    require(c.training_weeks >= 1, "training_weeks", "must be >= 1");
    const auto& p = c.markov_prior;
    require(p.gamma > 0.0 && p.beta > p.gamma && p.alpha > p.beta, "markov_prior", "requires alpha > beta > gamma > 0");
}

Config resolve_for_step(Config cfg, std::int64_t step_seconds) {
    if (step_seconds <= 0) {
        throw InputError("step_seconds must be positive");
    }
    if (cfg.candidate_period == 0) {
        cfg.candidate_period = static_cast<int>(std::max<std::int64_t>(1, 86400 / step_seconds));
    }
    if (cfg.relevance_steps == 0) {
        cfg.relevance_steps = static_cast<int>(std::max<std::int64_t>(1, 5 * 3600 / step_seconds));
    }
    return cfg;
}

namespace {

template <typename T>
T read_as(const nlohmann::json& v, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, int>) {
            if (!v.is_number_integer()) {
                reject(key, "expected an integer");
            }
        } else {
            if (!v.is_number()) {
                reject(key, "expected a number");
            }
        }
        return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
        reject(key, e.what());
    }
}

} // namespace

Config config_from_json(const nlohmann::json& j, Config base) {
    if (!j.is_object()) {
        throw InputError("config must be a JSON object");
    }
    using Setter = std::function<void(Config&, const nlohmann::json&, const std::string&)>;
    auto dbl = [](double Config::*f) -> Setter {
        return [f](Config& c, const nlohmann::json& v, const std::string& k) { c.*f = read_as<double>(v, k); };
    };
    auto integer = [](int Config::*f) -> Setter {
        return [f](Config& c, const nlohmann::json& v, const std::string& k) { c.*f = read_as<int>(v, k); };
    };
    const std::map<std::string, Setter> setters{
        {"coverage", dbl(&Config::coverage)},
        {"horizon", integer(&Config::horizon)},
        {"seasonality_ratio", dbl(&Config::seasonality_ratio)},
        {"outlier_sigmas", dbl(&Config::outlier_sigmas)},
        {"repetition", dbl(&Config::repetition)},
        {"extra_states", integer(&Config::extra_states)},
        {"window_len", integer(&Config::window_len)},
        {"min_violations", integer(&Config::min_violations)},
        {"relevance_steps", integer(&Config::relevance_steps)},
        {"mass_threshold", dbl(&Config::mass_threshold)},
        {"prior_variance", dbl(&Config::prior_variance)},
        {"discount", dbl(&Config::discount)},
        {"candidate_period", integer(&Config::candidate_period)},
        {"distinct_cap", integer(&Config::distinct_cap)},
        {"stationary_cadence", integer(&Config::stationary_cadence)},
        {"slot_tolerance", integer(&Config::slot_tolerance)},
        {"min_training", integer(&Config::min_training)},
        {"training_weeks", integer(&Config::training_weeks)},
        {"markov_alpha", [](Config& c, const nlohmann::json& v, const std::string& k) {
             c.markov_prior.alpha = read_as<double>(v, k);
         }},
        {"markov_beta", [](Config& c, const nlohmann::json& v, const std::string& k) {
             c.markov_prior.beta = read_as<double>(v, k);
         }},
        {"markov_gamma", [](Config& c, const nlohmann::json& v, const std::string& k) {
             c.markov_prior.gamma = read_as<double>(v, k);
         }},
    };
    for (const auto& [key, value] : j.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw InputError("config: unknown field '" + key + "'");
        }
        it->second(base, value, key);
    }
    validate(base);
    return base;
}

nlohmann::json config_to_json(const Config& c) {
    return {
        {"coverage", c.coverage},
        {"horizon", c.horizon},
        {"seasonality_ratio", c.seasonality_ratio},
        {"outlier_sigmas", c.outlier_sigmas},
        {"repetition", c.repetition},
        {"extra_states", c.extra_states},
        {"window_len", c.window_len},
        {"min_violations", c.min_violations},
        {"relevance_steps", c.relevance_steps},
        {"mass_threshold", c.mass_threshold},
        {"prior_variance", c.prior_variance},
        {"discount", c.discount},
        {"candidate_period", c.candidate_period},
        {"distinct_cap", c.distinct_cap},
        {"stationary_cadence", c.stationary_cadence},
        {"slot_tolerance", c.slot_tolerance},
        {"min_training", c.min_training},
        {"training_weeks", c.training_weeks},
        {"markov_alpha", c.markov_prior.alpha},
        {"markov_beta", c.markov_prior.beta},
        {"markov_gamma", c.markov_prior.gamma},
    };
}

} // namespace netcast
