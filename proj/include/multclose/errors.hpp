#pragma once

#include <stdexcept>
#include <string>

namespace multclose {

/// Malformed or inconsistent input (exit code 1 at the CLI).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The request is well formed, but the family does not satisfy the
/// hypotheses an algorithm needs (e.g. double-dual evaluation on a family
/// that is not upward closed). Reported as an input error by the CLI.
class UnsupportedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A configured safety bound would be exceeded (exit code 2).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant failed; always a bug or a wrong theorem (exit code 3).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace multclose
