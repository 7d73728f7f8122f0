#pragma once

#include <stdexcept>
#include <string>

namespace advkit {

// Error categories map 1:1 onto CLI exit codes (see tools/advkit_cli.cpp).
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CapabilityError : std::runtime_error {
    explicit CapabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace advkit
