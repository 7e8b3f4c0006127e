#pragma once

#include <stdexcept>
#include <string>

namespace cryptospn {

/// Malformed or unreadable input: syntax errors, bad file formats, I/O.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a model or configuration invariant.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transport failures and protocol violations between the two parties.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cryptospn
