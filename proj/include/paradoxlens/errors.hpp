#pragma once

#include <stdexcept>
#include <string>

namespace paradoxlens {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input table unusable at the header level (missing or unmappable column).
class SchemaError : public Error {
public:
    using Error::Error;
};

// A cell failed to parse; the message carries the offending line number.
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally valid input that violates a domain rule (duplicate ids,
// group label outside {0,1}, empty group, mismatched fingerprints).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Design matrix is rank deficient; the message names the collinear terms.
class SingularityError : public Error {
public:
    using Error::Error;
};

// Regression undefined: zero-variance variable or too few rows.
class DegenerateError : public Error {
public:
    using Error::Error;
};

// A sample is too small for the requested statistic.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// No covariate bin contains both groups; the adjusted comparison would
// require extrapolation outside the common support.
class NoOverlapError : public Error {
public:
    using Error::Error;
};

// Explicit bin edges do not cover the observed data range.
class CoverageError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace paradoxlens
