#pragma once

#include <stdexcept>
#include <string>

namespace levsim {

// Bad or inconsistent scenario configuration (CLI exit code 1).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unusable market data: missing files, malformed rows, empty alignment
// (CLI exit code 2).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace levsim
