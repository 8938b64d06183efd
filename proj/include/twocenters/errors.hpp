#pragma once

#include <stdexcept>
#include <string>

namespace twocenters {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A zero (or non-finite) center strength.
class InvalidCharges : public Error {
public:
    using Error::Error;
};

/// Position within the collision guard of one of the centers at (+-1, 0).
class FocusCollision : public Error {
public:
    using Error::Error;
};

/// The elliptic or separated chart is not invertible at the requested point.
class DegenerateChart : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function (x < 1, |y| > 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Negative energies are not classified by this library.
class OutOfScope : public Error {
public:
    using Error::Error;
};

class NonPositiveEnergy : public Error {
public:
    using Error::Error;
};

class OnBifurcationCurve : public Error {
public:
    using Error::Error;
};

/// No transversal section rule applies to the interval pattern of (E, K).
class NoSectionRule : public Error {
public:
    using Error::Error;
};

/// Step size underflow, step budget exhausted, or non-finite state.
class IntegrationFailure : public Error {
public:
    using Error::Error;
};

/// Classifier and integrator disagree about boundedness.
class IntegratorDefect : public Error {
public:
    using Error::Error;
};

} // namespace twocenters
