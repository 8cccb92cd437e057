#pragma once

#include <stdexcept>
#include <string>

namespace fairlens {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A type invariant does not hold (NaN feature, non-binary label, length mismatch).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The metric has no value for this input (empty group, single class, constant vector).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

/// A numeric parameter is out of range (k >= n, folds > n, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Bad method configuration (theta outside (0.5, 1), empty estimator list, unknown name).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A preprocessing request cannot be satisfied with the rows available.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Input matrix does not have the shape a fitted model expects.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed input file line.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input file parsed but is not the expected dataset (record count, checksum).
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Serialized model has the wrong version, a bad checksum, or missing fields.
class ModelFormatError : public Error {
public:
    using Error::Error;
};

/// A required input (for example the protected attribute at prediction time) was not supplied.
class MissingInputError : public Error {
public:
    using Error::Error;
};

}  // namespace fairlens
