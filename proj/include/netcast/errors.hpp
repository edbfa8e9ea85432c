#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace netcast {

// Bad caller input: non-finite values, out-of-range states, invalid
// parameters. The CLI maps these to exit code 2.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Not enough data to identify or forecast (training windows that are too
// short, outburst processes with fewer than two observations).
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Snapshot bytes that fail the magic, version, checksum or layout checks.
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An ingest event the engine refuses to apply (out-of-order timestamp,
// wrong series). The model is left untouched.
class RejectedEvent : public std::runtime_error {
public:
    RejectedEvent(std::string code, const std::string& what) : std::runtime_error(what), code_(std::move(code)) {}

    // Short token for output records: out-of-order, duplicate-step, ...
    [[nodiscard]] const std::string& code() const { return code_; }

private:
    std::string code_;
};

} // namespace netcast
