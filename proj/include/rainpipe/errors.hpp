#pragma once

#include <stdexcept>
#include <string>

namespace rainpipe {

// Bad or malformed input data (unreadable file, parse failure, schema
// mismatch, content violating an operation's preconditions).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration (bad hyperparameter, empty model roster, leaky
// feature requested, unknown column name in a config).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failure during fitting (diverging loss, non-finite values).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rainpipe
