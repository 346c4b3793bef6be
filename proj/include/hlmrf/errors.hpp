#pragma once

#include <stdexcept>
#include <string>

namespace hlmrf {

/// Index out of range, length mismatch, or any other inconsistency between
/// objects that are supposed to describe the same model.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input data (TSV files, truth values).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rule templates or constraint specs that cannot be grounded.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A constraint that no point can satisfy.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical breakdown, e.g. a conditional density whose sampled weights all underflow.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace hlmrf
