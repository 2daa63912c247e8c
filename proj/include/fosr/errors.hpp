#pragma once

#include <stdexcept>
#include <string>

namespace fosr {

/// Cholesky or other linear-algebra failure inside the sampler.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure tagged with the Gibbs iteration it happened in.
class ChainError : public std::runtime_error {
 public:
  ChainError(long iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

/// Input files that do not match the documented CSV schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fosr
