#pragma once

#include <stdexcept>
#include <string>

namespace oligo {

// Argument outside its mathematical domain (off-simplex triple, p outside [0,1], ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Lattice side too small for the panel/neighbour stencil.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inconsistent run configuration (update budget, schedule divisibility, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file; the message names the offending row or column.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Output file already exists and overwriting was not requested.
class OutputExistsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oligo
