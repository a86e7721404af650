#pragma once

#include <stdexcept>
#include <string>

namespace custprof {

// Error categories map 1:1 onto CLI exit codes (0 = ok).
enum class ErrorCategory : int {
    Config = 2,   // bad request: unknown column, invalid parameter, k out of range
    Data = 3,     // bad input: missing file, schema mismatch, unparseable cell
    Numeric = 4,  // numerical failure: divergence, singular system, undefined measure
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const { return category_; }
    int exitCode() const { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error(ErrorCategory::Config, message) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error(ErrorCategory::Data, message) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& message) : Error(ErrorCategory::Numeric, message) {}
};

}  // namespace custprof
