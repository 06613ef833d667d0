#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace frachs {

/// Numerical failure (solver breakdown, calibration miss, diverged iteration).
/// Distinct from std::invalid_argument so the CLI can map exit codes.
class numerical_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Iteration diverged; carries the recorded quotient history.
class iteration_error : public numerical_error {
  public:
    iteration_error(const std::string& what, std::vector<double> history)
        : numerical_error(what), history(std::move(history)) {}
    std::vector<double> history;
};

}  // namespace frachs
