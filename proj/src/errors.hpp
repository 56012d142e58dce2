#pragma once

#include <stdexcept>
#include <string>

namespace dynsparse {

// Factorization / state-corruption failures. `index` points at the offending
// pivot, predictor or time slot when one is known, -1 otherwise.
class numeric_error : public std::runtime_error {
 public:
  numeric_error(const std::string& msg, int index = -1)
      : std::runtime_error(msg), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dynsparse
