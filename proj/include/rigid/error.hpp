#pragma once

#include <stdexcept>
#include <string>

namespace rigid {

/// Failure of a numerical procedure on otherwise well-formed input:
/// degenerate data, rejected matrix pairs, solver stagnation, and so on.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (field files, experiment config files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rigid
