#pragma once

#include <stdexcept>
#include <string>

namespace feller {

/// Malformed or inconsistent user input (scenario files, configs, dimensions).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine could not reach the requested tolerance within its
/// evaluation budget. Carries the error estimate it did achieve.
class ToleranceFailure : public std::runtime_error {
public:
    ToleranceFailure(const std::string& what, double requested, double achieved)
        : std::runtime_error(what + " (requested abs tol " + std::to_string(requested) +
                             ", achieved " + std::to_string(achieved) + ")"),
          requested_tol(requested),
          achieved_error(achieved) {}

    double requested_tol;
    double achieved_error;
};

}  // namespace feller
