#pragma once

#include <stdexcept>
#include <string>

namespace mmwcs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// argument outside the mathematical domain of an operation
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public Error {
public:
    using Error::Error;
};

// rank deficiency or coincident atoms in an estimate
class DegenerateEstimate : public Error {
public:
    using Error::Error;
};

// coherence hypothesis of a bound does not hold
class BoundInvalid : public Error {
public:
    using Error::Error;
};

// memory / enumeration guards
class ResourceLimit : public Error {
public:
    using Error::Error;
};

class TableError : public Error {
public:
    using Error::Error;
};

}  // namespace mmwcs
