// errors.hpp: exception hierarchy for the shortcut-to-equilibrium library

#pragma once

#include <stdexcept>
#include <string>

namespace ste {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// (omega, epsilon) = (0, 0): the {H, L, C} operator basis collapses.
struct DegenerateFrequency : Error {
    DegenerateFrequency() : Error("degenerate frequency: omega = epsilon = 0") {}
};

struct OutOfRange : Error {
    using Error::Error;
};

struct NonPositiveFrequency : Error {
    using Error::Error;
};

struct InvalidState : Error {
    using Error::Error;
};

struct InvalidConfig : Error {
    using Error::Error;
};

struct Overflow : Error {
    using Error::Error;
};

// Local RK4 error estimate from step doubling exceeded the tolerance.
struct StepTooLarge : Error {
    using Error::Error;
};

struct PositivityLoss : Error {
    using Error::Error;
};

struct SingularSystem : Error {
    using Error::Error;
};

struct NonPositiveAnsatz : Error {
    using Error::Error;
};

// No admissible effective frequency reproduces the requested beta-dot.
struct NoRoot : Error {
    double time;
    NoRoot(const std::string& what, double t) : Error(what), time(t) {}
};

struct DegenerateHamiltonian : Error {
    using Error::Error;
};

struct NonThermalState : Error {
    using Error::Error;
};

struct DivisionByZero : Error {
    using Error::Error;
};

// d(mu)/dt reached 2 kappa^2 d(theta-bar)/dt: the inertial solution is unreliable.
struct InertialViolation : Error {
    double ratio;
    InertialViolation(const std::string& what, double r) : Error(what), ratio(r) {}
};

}  // namespace ste
