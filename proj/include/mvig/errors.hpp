#pragma once

#include <stdexcept>
#include <string>

namespace mvig {

/// Raised when an experiment or scenario configuration is structurally
/// invalid (missing field, out-of-range value, inconsistent combination).
/// Distinct from std::invalid_argument, which signals bad arguments to
/// individual library calls.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mvig
