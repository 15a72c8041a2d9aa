#pragma once

#include <stdexcept>
#include <string>

namespace spectralmix {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function, e.g. x outside [0,pi].
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or out-of-range parameters supplied by the caller.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Numerical solver failure: integration, bracketing, linear algebra.
class SolverError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Evaluation point too close to a pole of the evaluated function.
class PoleError : public Error {
public:
    using Error::Error;
};

/// Coincident zeros/poles or repeated poles.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

class ConditioningError : public Error {
public:
    using Error::Error;
};

/// Bad configuration file or command-line input.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace spectralmix
