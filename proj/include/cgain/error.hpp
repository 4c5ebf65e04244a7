#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cgain {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input does not conform to the feature schema (bad index, unknown label,
/// duplicate feature name, inconsistent cardinality).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A vector handed to an encoder is not a valid binary code.
class EncodingError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. Row and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : Error(format(what, row, column)), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t row, std::size_t column) {
        if (row == 0) return what;
        std::string out = "row " + std::to_string(row);
        if (column != 0) out += ", column " + std::to_string(column);
        return out + ": " + what;
    }

    std::size_t row_;
    std::size_t column_;
};

/// Iterative numeric routine failed to converge.
class NumericError : public Error {
public:
    NumericError(const std::string& what, std::size_t iterations)
        : Error(what + " (after " + std::to_string(iterations) + " iterations)"), iterations_(iterations) {}

    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::size_t iterations_;
};

/// NaN or Inf reached the parameters or losses during training.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t epoch)
        : Error(what + " at epoch " + std::to_string(epoch)), epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace cgain
