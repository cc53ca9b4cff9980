#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace barrierlab {

/// Base class for every error thrown by the library. Catching this is enough
/// to distinguish "the mathematics refused" from a programming mistake.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside the mathematical domain of an operation (negative t,
/// point not on the boundary, NaN input, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A growth function failed a structural requirement (nonpositive sample,
/// nonmonotone table, invalid exponent).
class InvalidNonlinearity : public Error {
public:
    using Error::Error;
};

/// An ODE or quadrature routine could not reach the requested tolerance.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Eigen-decomposition failure (should not happen for the small symmetric
/// matrices this library handles, but the contract names it).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Increasing profile g left its existence interval before the requested
/// horizon and no admissible start value can fix it.
class ProfileBlowup : public Error {
public:
    using Error::Error;
};

/// Barrier construction ran out of admissible parameters (start value
/// underflow before the target boundary increment was reached).
class ConstructionFailed : public Error {
public:
    using Error::Error;
};

///// The growth condition needed by the growing supersolution barrier failed:
/// the start-value cap was reached before the boundary increment target.
class PhiBViolated : public Error {
public:
    using Error::Error;
};

/// The decay profile's blow-down time forces the outer-radius factor k ≤ 1,
/// leaving no annulus to build on.
class AnnulusTooThin : public Error {
public:
    using Error::Error;
};

/// Radius exceeds the admissible bound of the exponential barrier.
class RadiusTooLarge : public Error {
public:
    using Error::Error;
};

/// Barrier evaluated outside its open annulus.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

/// A certified-sign margin came out with the wrong sign. Carries the radius
/// where the violation was observed.
class StrictnessViolation : public Error {
public:
    StrictnessViolation(const std::string& msg, double radius, double margin)
        : Error(msg), radius_(radius), margin_(margin) {}
    double radius() const { return radius_; }
    double margin() const { return margin_; }

private:
    double radius_;
    double margin_;
};

/// Requested counterexample does not exist for this nonlinearity (the
/// principle it is meant to violate actually holds).
class NotACounterexample : public Error {
public:
    using Error::Error;
};

/// Residual grid touches a point where the function is not twice
/// differentiable.
class KinkPoint : public Error {
public:
    using Error::Error;
};

/// Grid too coarse for the requested domain or band.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Nonlinear iteration stagnated. Carries the residual history so the caller
/// can see how far it got.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& msg, std::vector<double> history)
        : Error(msg), history_(std::move(history)) {}
    const std::vector<double>& residual_history() const { return history_; }

private:
    std::vector<double> history_;
};

/// An ordering check was invoked with data violating its hypotheses.
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// A field required to be positive changed sign where it should not.
class PositivityError : public Error {
public:
    using Error::Error;
};

/// Malformed experiment configuration. Carries a JSON-pointer-style path so
/// the CLI can print a line-anchored message.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg, std::string where = "")
        : Error(where.empty() ? msg : where + ": " + msg), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

} // namespace barrierlab
