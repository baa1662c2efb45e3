#pragma once

#include <stdexcept>
#include <string>

namespace chemodem {

// Bad user input: malformed config, invalid model description. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime failure inside a simulation or fit: overflow, non-finite propensity,
// singular system. CLI exit code 3.
struct SimulationError : std::runtime_error {
    explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chemodem
