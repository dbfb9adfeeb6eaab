#pragma once

#include <stdexcept>
#include <string>

namespace qspectra {

// A required model or circuit parameter was not supplied.
class MissingParameter : public std::invalid_argument
{
public:
    explicit MissingParameter(const std::string& field)
        : std::invalid_argument("missing required parameter '" + field + "'")
        , field_(field)
    {
    }
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Solver or estimator could not produce a trustworthy number.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Measured features are mutually inconsistent with the inversion formula
// (negative radicand, off-ladder phonon dip, ...).
class InconsistentFeatures : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

class AmbiguousClassification : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace qspectra
