#pragma once

#include <stdexcept>
#include <string>

namespace labeltree {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, bundles, vocabularies).
struct DataError : Error {
  using Error::Error;
};

// A quantity that is mathematically undefined for the given input, or an
// argument outside the operation's domain.
struct DomainError : Error {
  using Error::Error;
};

// Broken internal invariant. Reaching this is a bug.
struct InvariantError : Error {
  using Error::Error;
};

}  // namespace labeltree
