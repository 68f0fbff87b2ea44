#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace specrec {

// Base class for library failures that are not precondition violations.
// Precondition violations (bad dimensions, out-of-range parameters) throw
// std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input file could not be parsed. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::int64_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::int64_t line() const { return line_; }

private:
    std::int64_t line_;
};

// No usable interactions after loading/filtering.
class EmptyDatasetError : public Error {
public:
    using Error::Error;
};

// Iterative solver did not reach the requested tolerance. Carries the best
// residuals seen for the requested components.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> residuals)
        : Error(what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residuals() const { return residuals_; }

private:
    std::vector<double> residuals_;
};

// Spectrum fit could not be performed (e.g. degenerate spectrum).
class FitError : public Error {
public:
    using Error::Error;
};

// All factor components were removed; nothing left to score with.
class EmptyModelError : public Error {
public:
    using Error::Error;
};

}  // namespace specrec
