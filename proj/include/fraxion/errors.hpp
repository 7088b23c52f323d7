#pragma once

#include <stdexcept>
#include <string>

namespace fraxion {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or non-finite input data (bad parameters, malformed files, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The healing problem has no feasible point at any fraction count
/// (a single minimum-dose fraction already exceeds the OAR budget).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// A fixed-N subproblem has no feasible point.
class InfeasibleNError : public Error {
public:
    using Error::Error;
};

/// The fraction-count range implied by the instance exceeds the configured cap.
class CapExceededError : public Error {
public:
    using Error::Error;
};

/// Exhaustive search was requested beyond the configured enumeration cutoff.
class TooLargeError : public Error {
public:
    using Error::Error;
};

/// The search grid is too coarse to contain any feasible point.
class NoFeasibleGridPointError : public Error {
public:
    using Error::Error;
};

/// Internal consistency failure; indicates a bug, not bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace fraxion
