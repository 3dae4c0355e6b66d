#pragma once

#include <stdexcept>
#include <string>

namespace srcq {

// Bad argument values (poles, out-of-range exponents, ...).
class domain_error : public std::domain_error {
public:
  explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// API misuse: mismatched grids, zero fields where nonzero is required, ...
class usage_error : public std::logic_error {
public:
  explicit usage_error(const std::string& what) : std::logic_error(what) {}
};

// A numerical procedure failed to reach its target accuracy.
class numeric_error : public std::runtime_error {
public:
  numeric_error(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_error(achieved) {}
  double achieved_error;
};

// Violated model constraint (K < 0, hypothesis failure promoted to an error).
class constraint_error : public std::runtime_error {
public:
  explicit constraint_error(const std::string& what) : std::runtime_error(what) {}
};

// Nehari projection could not bracket a sign change.
class projection_error : public std::runtime_error {
public:
  explicit projection_error(const std::string& what) : std::runtime_error(what) {}
};

// Descent made no progress for too many consecutive iterations.
class stagnation_error : public std::runtime_error {
public:
  stagnation_error(const std::string& what, double energy, double grad_norm)
      : std::runtime_error(what), last_energy(energy), last_grad_norm(grad_norm) {}
  double last_energy;
  double last_grad_norm;
};

class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace srcq
