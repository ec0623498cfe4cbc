#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oids {

// Arguments that violate a documented precondition (family mismatch, bad
// probability vector, unknown config key, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An observation that every parameter in the model class deems impossible.
class ModelInconsistency : public std::runtime_error {
 public:
  ModelInconsistency(std::size_t context, std::size_t action, double loss);

  std::size_t context() const { return context_; }
  std::size_t action() const { return action_; }
  double loss() const { return loss_; }

 private:
  std::size_t context_;
  std::size_t action_;
  double loss_;
};

// Iterative solver that failed to reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double achieved_gap)
      : std::runtime_error(what), achieved_gap_(achieved_gap) {}
  double achieved_gap() const { return achieved_gap_; }

 private:
  double achieved_gap_;
};

}  // namespace oids
