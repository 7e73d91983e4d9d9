// su2.hpp: spin-1/2 algebra, the time-dependent operator basis {H, L, C},
// the inertial decomposition matrices B(mu), V(mu) and the eigenoperators
// of the free propagator.
//
// Units: atomic units with hbar = k_B = 1. Spin components are S_i = sigma_i / 2
// in the fixed z basis.

#pragma once

#include "ste/errors.hpp"
#include "ste/matrix2.hpp"

#include <array>
#include <cmath>

namespace ste {

namespace spin {

inline Mat2 sx() {
    Mat2 m;
    m << 0.0, 0.5, 0.5, 0.0;
    return m;
}

inline Mat2 sy() {
    Mat2 m;
    m << 0.0, -0.5 * I_unit, 0.5 * I_unit, 0.0;
    return m;
}

inline Mat2 sz() {
    Mat2 m;
    m << 0.5, 0.0, 0.0, -0.5;
    return m;
}

inline Mat2 identity() { return Mat2::Identity(); }

}  // namespace spin

/// Generalized Rabi frequency sqrt(omega^2 + epsilon^2).
inline double generalized_rabi(double omega, double epsilon) {
    if (omega == 0.0 && epsilon == 0.0) throw DegenerateFrequency();
    return std::hypot(omega, epsilon);
}

/// Adiabatic parameter mu = (omega_dot*epsilon - omega*epsilon_dot) / rabi^3.
inline double adiabatic_parameter(double omega, double epsilon, double omega_dot, double epsilon_dot) {
    const double rabi = generalized_rabi(omega, epsilon);
    return (omega_dot * epsilon - omega * epsilon_dot) / (rabi * rabi * rabi);
}

inline double kappa(double mu) { return std::sqrt(1.0 + mu * mu); }

// Instantaneous frame H = wS_z + eS_x, L = eS_z - wS_x, C = rabi*S_y.
// The three operators are Liouville-orthogonal with tr(X^dag X) = rabi^2 / 2.
struct BasisFrame {
    Mat2 H;
    Mat2 L;
    Mat2 C;
    double omega{0.0};
    double epsilon{0.0};
    double rabi{0.0};

    static BasisFrame make(double omega, double epsilon) {
        BasisFrame f;
        f.omega = omega;
        f.epsilon = epsilon;
        f.rabi = generalized_rabi(omega, epsilon);
        f.H = omega * spin::sz() + epsilon * spin::sx();
        f.L = epsilon * spin::sz() - omega * spin::sx();
        f.C = f.rabi * spin::sy();
        return f;
    }

    std::array<Mat2, 3> operators() const { return {H, L, C}; }

    double norm_squared() const { return 0.5 * rabi * rabi; }
};

struct InertialParameters {
    double mu{0.0};
    double kappa{1.0};
    double theta_bar{0.0};

    static InertialParameters make(double mu, double theta_bar = 0.0) {
        return {mu, ste::kappa(mu), theta_bar};
    }
};

/// B(mu) = i [[0, mu, 0], [-mu, 0, 1], [0, -1, 0]]; spectrum {0, kappa, -kappa}.
inline Mat3 b_matrix(double mu) {
    Mat3 b;
    b << 0.0, mu, 0.0,
        -mu, 0.0, 1.0,
        0.0, -1.0, 0.0;
    return I_unit * b;
}

struct DiagonalizingPair {
    Mat3 V;
    Mat3 V_inv;
};

// Columns of V are the eigenvectors of B for (0, +kappa, -kappa). The rows of
// V_inv are the matching left eigenvectors, normalized so V_inv V = 1.
inline DiagonalizingPair v_matrix(double mu) {
    const double k = kappa(mu);
    const double k2 = k * k;
    DiagonalizingPair p;
    p.V << 1.0, -mu, -mu,
        0.0, I_unit * k, -I_unit * k,
        mu, 1.0, 1.0;
    p.V_inv << 1.0 / k2, 0.0, mu / k2,
        -mu / (2.0 * k2), -I_unit / (2.0 * k), 1.0 / (2.0 * k2),
        -mu / (2.0 * k2), I_unit / (2.0 * k), 1.0 / (2.0 * k2);
    return p;
}

inline Eigen::Vector3d b_eigenvalues(double mu) {
    const double k = kappa(mu);
    return {0.0, k, -k};
}

struct EigenoperatorSet {
    Mat2 xi;
    Mat2 sigma;
    Mat2 sigma_dag;
    double mu{0.0};
    double kappa{1.0};

    Eigen::Vector3d eigenvalues() const { return {0.0, kappa, -kappa}; }
};

// xi = (H0 + mu C0) / (kappa rabi0)
// sigma = (-mu H0 - i kappa L0 + C0) / (2 kappa^2 rabi0)
inline EigenoperatorSet eigenoperators(double mu, const BasisFrame& frame0) {
    if (!(frame0.rabi > 0.0)) throw DegenerateFrequency();
    const double k = kappa(mu);
    EigenoperatorSet e;
    e.mu = mu;
    e.kappa = k;
    e.xi = (frame0.H + mu * frame0.C) / (k * frame0.rabi);
    e.sigma = (-mu * frame0.H - I_unit * k * frame0.L + frame0.C) / (2.0 * k * k * frame0.rabi);
    e.sigma_dag = e.sigma.adjoint();
    return e;
}

// Unitary R(mu) = exp(-i atan(mu) L0/rabi0): rotates the mu = 0 eigenoperators
// onto the mu ones, R xi(0) R^dag = xi(mu) and R sigma(0) R^dag = kappa sigma(mu).
inline Mat2 comoving_rotation(double mu, const BasisFrame& frame0) {
    const double angle = std::atan(mu);
    return expm2(-I_unit * angle * frame0.L / frame0.rabi);
}

}  // namespace ste
