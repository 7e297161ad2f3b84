#pragma once

#include <stdexcept>
#include <string>

namespace gauss {

/// Bad or missing experiment configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Dataset ingestion failure: missing file, malformed payload (CLI exit code 3).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Suite analysis requires a random baseline (CLI exit code 5).
struct MissingBaselineError : std::runtime_error {
    explicit MissingBaselineError(const std::string& what) : std::runtime_error(what) {}
};

/// Report requested on an unanalyzed or empty suite (CLI exit code 6).
struct ReportError : std::runtime_error {
    explicit ReportError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gauss
