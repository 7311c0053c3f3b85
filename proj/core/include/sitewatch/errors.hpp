#pragma once

#include <stdexcept>
#include <string>

namespace sitewatch {

/// Malformed input file; message carries path and line when known.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Out-of-order frame ids / non-monotonic ticks on a stream consumer.
struct StreamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad configuration key or value; message names the key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Deterministic pump failed to reach quiescence within its round bound.
struct LivelockError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sitewatch
