#pragma once

#include <stdexcept>
#include <string>

namespace colabm {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Schema problems: duplicate/empty column names, unknown attributes, bad label sets.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A value does not match the dtype of the column it is written to.
class DtypeError : public Error {
public:
    using Error::Error;
};

/// An operation referenced an agent that is unknown or no longer alive.
class LivenessError : public Error {
public:
    using Error::Error;
};

/// Misuse of batch staging (nested begin, double apply, structural change while open).
class BatchError : public Error {
public:
    using Error::Error;
};

/// Parameters outside an operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

} // namespace colabm
