#pragma once

#include <stdexcept>
#include <string>

namespace g0gd {

// Base class for failures of the numerics themselves (as opposed to bad
// arguments, which throw std::domain_error / std::invalid_argument).
// The CLI maps these to exit code 2.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Iteration cap hit before the gradient test passed.
class non_convergence_error : public numerical_error {
 public:
  explicit non_convergence_error(const std::string& msg) : numerical_error(msg) {}
};

// Sample unusable for likelihood work (e.g. zero variance).
class degenerate_sample_error : public numerical_error {
 public:
  explicit degenerate_sample_error(const std::string& msg) : numerical_error(msg) {}
};

// Statistic undefined for the given estimates (T3 with both components zero).
class degenerate_statistic_error : public numerical_error {
 public:
  explicit degenerate_statistic_error(const std::string& msg) : numerical_error(msg) {}
};

// A statistic was requested from fits that did not converge or fell
// outside the feasibility box.
class fit_failure_error : public numerical_error {
 public:
  explicit fit_failure_error(const std::string& msg) : numerical_error(msg) {}
};

}  // namespace g0gd
