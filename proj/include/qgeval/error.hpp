#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qgeval {

/// Precondition violated by the caller (bad sizes, out-of-range parameters).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but carries no information for the requested
/// statistic (constant vectors, all-zero differences, ...).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A masked language model failed to produce a score.
class ModelError : public std::runtime_error {
 public:
  ModelError(const std::string& what, std::size_t word_index)
      : std::runtime_error(what), word_index_(word_index) {}

  std::size_t word_index() const noexcept { return word_index_; }

 private:
  std::size_t word_index_;
};

/// Connection to an out-of-process model could not be established or broke.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qgeval
