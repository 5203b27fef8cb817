#pragma once

#include <stdexcept>
#include <string>

namespace lap2d {

// Evaluation outside the mathematical domain of an operation
// (coincident kernel points, wave number on the wrong branch, ...).
class domain_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed configuration: unknown keys, unparsable values, violated
// parameter invariants.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear-algebra failure: singular pivot in the factorization, iteration
// breakdown, or failure to reach the requested residual.
class solver_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A closed-form oracle was invoked for a problem it is not valid for
// (convolution oracles require identity coefficients).
class oracle_misuse_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lap2d
