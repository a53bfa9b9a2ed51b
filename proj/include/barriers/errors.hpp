#pragma once

#include <stdexcept>
#include <string>

namespace barriers {

/// Bad configuration, bad CLI usage, or invalid input contracts (exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable files and streams (exit code 3).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A metric that is undefined for the given inputs (e.g. empty confusion matrix).
struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace barriers
