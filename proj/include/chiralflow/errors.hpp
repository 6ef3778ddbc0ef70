// errors.hpp: exception types raised by the chiralflow library

#pragma once

#include <stdexcept>
#include <string>

namespace chiralflow {

// Invalid physical or numerical parameter (N < 3, negative width, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Mode or site index outside its admissible range.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Array/matrix dimensions do not agree.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Sample grid is not uniform (or too short) where a uniform grid is required.
class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// State is not normalized within the tolerance an operation requires.
class NormalizationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Eigensolver or root finder did not converge.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Adaptive integration gave up; time_reached is the last accepted time.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time_reached)
        : std::runtime_error(what + " (time reached: " + std::to_string(time_reached) + ")"),
          time_reached_(time_reached) {}

    double time_reached() const noexcept { return time_reached_; }

private:
    double time_reached_;
};

} // namespace chiralflow
