#pragma once

#include <stdexcept>
#include <string>

namespace focsim {

// Non-finite or otherwise out-of-domain argument to a pure function.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Bad parameters, gains, or scenario configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The plant state became non-finite.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double time_s, std::string signal)
        : std::runtime_error("simulation diverged at t=" + std::to_string(time_s) +
                             " s (signal '" + signal + "' is not finite)"),
          time_s_(time_s),
          signal_(std::move(signal)) {}

    double time_s() const noexcept { return time_s_; }
    const std::string& signal() const noexcept { return signal_; }

private:
    double time_s_;
    std::string signal_;
};

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UndefinedThd : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace focsim
