#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmc {

// Root of every numeric/model error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter is non-finite or outside its documented domain.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// The caller violated an operation precondition (e.g. off-resonance gap).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The S21 denominator vanished. Only reachable with zero damping everywhere.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, std::size_t index = 0)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Input carries no information to work with (e.g. an all-zero spectrum).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

}  // namespace pmc
