#pragma once

#include <stdexcept>
#include <string>

namespace seqtest {

// Error taxonomy mirrored by the C API status codes and the CLI exit codes:
// config_error -> bad user input (exit 2), numeric_error -> failed numerics
// (exit 3), usage_error -> API misuse (e.g. stepping a stopped state).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& m) : std::runtime_error(m) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& m) : std::runtime_error(m) {}
};

struct usage_error : std::logic_error {
    explicit usage_error(const std::string& m) : std::logic_error(m) {}
};

struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace seqtest
