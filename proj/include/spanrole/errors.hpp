#pragma once

#include <stdexcept>
#include <string>

namespace spanrole {

// Caller broke a documented precondition (bad index, shape mismatch, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Malformed or inconsistent input data. Carries a 1-based line number when
// the problem can be pinned to a line of an input file (0 otherwise).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& message, std::size_t line = 0)
        : std::runtime_error(line == 0 ? message
                                       : "line " + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Non-finite loss or parameters during optimization.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const char* message) {
    if (!condition) {
        throw ContractViolation(message);
    }
}

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw ContractViolation(message);
    }
}

}  // namespace spanrole
