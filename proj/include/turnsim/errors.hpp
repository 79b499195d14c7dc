#pragma once

#include <stdexcept>
#include <string>

namespace turnsim {

/// Invalid configuration or scenario data. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid call or command-line usage (bad lengths, bad flags). Maps to CLI exit code 1.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace turnsim
