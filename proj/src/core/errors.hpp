#pragma once

#include <stdexcept>
#include <string>

namespace evcop {

// Bad caller input: malformed data, out-of-range parameters, invalid files.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed (no bracket, divergence, non-finite values).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evcop
