#pragma once

#include <stdexcept>
#include <string>

namespace cartsim {

/// Base class for every error raised by the library. The CLI maps these to
/// exit code 1; anything else escaping a command is a bug.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An identifier (action, environment, world, agent, name) was not found.
class LookupError : public Error {
public:
    using Error::Error;
};

/// An argument violated a structural invariant (foreign world, bad
/// distribution, arity mismatch, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Exhaustive enumeration was requested over a universe that is too large.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Sampling could not proceed (no admissible event, no matching selector entry).
class SelectionError : public Error {
public:
    using Error::Error;
};

/// Incompatible components were wired together (e.g. partial bound above complete bound).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace cartsim
