#pragma once

#include <stdexcept>
#include <string>

namespace nhspec {

/// Base of every error raised by the library. The CLI maps these to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class NumericRange : public Error {
public:
    using Error::Error;
};

/// Fixed-step integrator refused a step size outside its stability bound.
class InvalidStep : public Error {
public:
    using Error::Error;
};

class IntegratorFailure : public Error {
public:
    using Error::Error;
};

/// A sampled probability left [0, 1] by more than round-off.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

class UncertaintyUnavailable : public Error {
public:
    using Error::Error;
};

/// Band tracking could not decide a pairing; carries the offending k interval.
class GridRefinementRequired : public Error {
public:
    GridRefinementRequired(const std::string& what, double k_lo, double k_hi)
        : Error(what), k_lo_(k_lo), k_hi_(k_hi) {}
    double k_lo() const { return k_lo_; }
    double k_hi() const { return k_hi_; }

private:
    double k_lo_;
    double k_hi_;
};

class BaseEnergyError : public Error {
public:
    using Error::Error;
};

/// Phase increment per k step too large, or snapped invariant residue too big.
class ResolutionError : public Error {
public:
    using Error::Error;
};

class DegenerateBands : public Error {
public:
    using Error::Error;
};

}  // namespace nhspec
