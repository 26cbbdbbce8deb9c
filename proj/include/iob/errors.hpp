#pragma once

#include <stdexcept>
#include <string>

namespace iob {

// Input violates a mathematical precondition (negative rate, zero capacity, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Request exceeds a declared device capability (e.g. rate above protocol max).
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// CSV ingestion failure with row/column location.
class IngestError : public std::runtime_error {
public:
    IngestError(std::size_t row, std::string column, const std::string& what_arg)
        : std::runtime_error("row " + std::to_string(row) + ", column '" + column +
                             "': " + what_arg),
          row_(row),
          column_(std::move(column)) {}

    std::size_t row() const { return row_; }
    const std::string& column() const { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

// Regression cannot be performed (too few distinct abscissae).
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace iob
