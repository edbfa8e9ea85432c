#include <gtest/gtest.h>

#include "netcast/config.hpp"
#include "netcast/errors.hpp"

using namespace netcast;

namespace {

std::string error_for(Config c) {
    try {
        validate(c);
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Config, DefaultsAreValid) {
    EXPECT_NO_THROW(validate(Config{}));
    const Config c;
    EXPECT_EQ(c.coverage, 0.95);
    EXPECT_EQ(c.horizon, 3);
    EXPECT_EQ(c.extra_states, 5);
    EXPECT_EQ(c.stationary_cadence, 100);
}

TEST(Config, EveryBadFieldIsNamed) {
    auto with = [](auto mutate) {
        Config c;
        mutate(c);
        return c;
    };
    EXPECT_NE(error_for(with([](Config& c) { c.coverage = 1.0; })).find("config.coverage"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.coverage = 0.0; })).find("config.coverage"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.horizon = 0; })).find("config.horizon"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.seasonality_ratio = 0; })).find("seasonality_ratio"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.outlier_sigmas = -1; })).find("outlier_sigmas"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.repetition = 0; })).find("repetition"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.repetition = 1.01; })).find("repetition"), std::string::npos);
    EXPECT_EQ(error_for(with([](Config& c) { c.repetition = 1.0; })), "");
    EXPECT_NE(error_for(with([](Config& c) { c.extra_states = -1; })).find("extra_states"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.window_len = 0; })).find("window_len"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.min_violations = 11; })).find("min_violations"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.relevance_steps = -1; })).find("relevance_steps"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.mass_threshold = 1; })).find("mass_threshold"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.prior_variance = 0; })).find("prior_variance"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.discount = 0; })).find("discount"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.candidate_period = -1; })).find("candidate_period"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.distinct_cap = 0; })).find("distinct_cap"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.stationary_cadence = 0; })).find("stationary_cadence"),
              std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.slot_tolerance = -1; })).find("slot_tolerance"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.min_training = 0; })).find("min_training"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.training_weeks = 0; })).find("training_weeks"), std::string::npos);
    EXPECT_NE(error_for(with([](Config& c) { c.markov_prior.beta = 11; })).find("markov_prior"), std::string::npos);
}

TEST(Config, JsonRoundTrip) {
    Config c;
    c.coverage = 0.9;
    c.horizon = 6;
    c.markov_prior = MarkovPrior{12, 6, 1};
    EXPECT_EQ(config_from_json(config_to_json(c)), c);
}

TEST(Config, JsonErrors) {
    EXPECT_THROW(config_from_json(nlohmann::json{{"colour", 1}}), InputError);
    EXPECT_THROW(config_from_json(nlohmann::json{{"horizon", 2.5}}), InputError);
    EXPECT_THROW(config_from_json(nlohmann::json{{"coverage", "high"}}), InputError);
    EXPECT_THROW(config_from_json(nlohmann::json::array()), InputError);
    EXPECT_THROW(config_from_json(nlohmann::json{{"coverage", 2.0}}), InputError);
    EXPECT_EQ(config_from_json(nlohmann::json{{"horizon", 5}}).horizon, 5);
}

TEST(Config, StepDerivedDefaults) {
    const Config c = resolve_for_step(Config{}, 600);
    EXPECT_EQ(c.candidate_period, 144);
    EXPECT_EQ(c.relevance_steps, 30);
    Config d;
    d.candidate_period = 24;
    EXPECT_EQ(resolve_for_step(d, 300).candidate_period, 24);
    EXPECT_EQ(resolve_for_step(d, 300).relevance_steps, 60);
    EXPECT_THROW(resolve_for_step(d, 0), InputError);
}
