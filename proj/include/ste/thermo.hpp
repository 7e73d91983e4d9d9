// thermo.hpp: thermodynamic bookkeeping along a trajectory

#pragma once

#include "ste/bath.hpp"
#include "ste/density.hpp"
#include "ste/errors.hpp"
#include "ste/free_propagation.hpp"
#include "ste/name_dynamics.hpp"
#include "ste/protocol.hpp"
#include "ste/su2.hpp"
#include "ste/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace ste {

namespace detail {

inline double shannon(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

}  // namespace detail

/// -tr(rho ln rho) from the eigenvalues; 0 ln 0 = 0.
inline double von_neumann_entropy(const Mat2& rho) {
    const Eigen::Vector2d ev = eigh2(rho).values;
    return detail::shannon(std::max(ev(0), 0.0)) + detail::shannon(std::max(ev(1), 0.0));
}

inline double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix()); }

// Shannon entropy of the populations in the eigenbasis of H.
inline double energy_entropy(const Mat2& rho, const Mat2& hamiltonian) {
    const Eigh2 e = eigh2(hamiltonian);
    if (e.values(1) - e.values(0) < 1e-12) throw DegenerateHamiltonian("energy gap below 1e-12");
    double s = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double p = (e.vectors.col(i).adjoint() * rho * e.vectors.col(i))(0, 0).real();
        s += detail::shannon(std::max(p, 0.0));
    }
    return s;
}

inline double energy_entropy(const DensityMatrix& rho, const Mat2& hamiltonian) {
    return energy_entropy(rho.matrix(), hamiltonian);
}

/// P = tr(rho dH/dt).
inline double power(const Mat2& rho, const Mat2& hamiltonian_dot) { return (rho * hamiltonian_dot).trace().real(); }

/// J = tr(H d rho/dt).
inline double heat_current(const Mat2& hamiltonian, const Mat2& rho_dot) {
    return (hamiltonian * rho_dot).trace().real();
}

struct EntropyProduction {
    double rate{0.0};
    bool regularized{false};  // an eigenvalue was clipped at 1e-14 before the log
};

inline constexpr double kLogFloor = 1e-14;

// Spohn form -tr[(d rho/dt)(ln rho - ln rho_IA)].
inline EntropyProduction entropy_production_rate(const Mat2& rho, const Mat2& attractor, const Mat2& rho_dot) {
    EntropyProduction out;
    out.regularized = eigh2(rho).values(0) < kLogFloor || eigh2(attractor).values(0) < kLogFloor;
    const Mat2 diff = logm_pd(rho, kLogFloor) - logm_pd(attractor, kLogFloor);
    out.rate = -(rho_dot * diff).trace().real();
    return out;
}

// Instantaneous dissipator k_down D[sigma(mu)] + k_up D[sigma^dag(mu)] applied to rho.
inline Mat2 dissipator_action(const Mat2& rho, const EigenoperatorSet& eig, const RatePair& k) {
    auto d = [&rho](const Mat2& a) {
        const Mat2 ada = a.adjoint() * a;
        return Mat2(a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada));
    };
    return k.k_down * d(eig.sigma) + k.k_up * d(eig.sigma_dag);
}

enum class SpeedLimitForm {
    squared,  // ||r_k F_k||^2 = r_k^2 ||F_k||^2
    linear,   // r_k ||F_k||^2
};

// 4 * integral of sum_k ||r_k F_k||^2_sp over the grid (trapezoid).
inline double speed_limit_bound(const ControlProtocol& p, const BathSpec& bath,
                                SpeedLimitForm form = SpeedLimitForm::squared) {
    const BasisFrame frame0 = p.frame(0);
    std::vector<double> integrand(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const EigenoperatorSet e = eigenoperators(p[i].mu, frame0);
        const RatePair k = rates(p[i].alpha, bath);
        const double n_down = std::pow(spectral_norm(e.sigma), 2);
        const double n_up = std::pow(spectral_norm(e.sigma_dag), 2);
        integrand[i] = form == SpeedLimitForm::squared ? k.k_down * k.k_down * n_down + k.k_up * k.k_up * n_up
                                                        : k.k_down * n_down + k.k_up * n_up;
    }
    double acc = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) acc += 0.5 * p.spacing() * (integrand[i - 1] + integrand[i]);
    return 4.0 * acc;
}

/// T_eff = -rabi / beta.
inline double effective_temperature(double beta, double rabi) {
    if (!(beta < 0.0)) throw NonThermalState("effective temperature needs beta < 0, got " + std::to_string(beta));
    return -rabi / beta;
}

// W_adi / W for an expansion, W / W_adi for a compression.
inline double work_efficiency(double work, double work_adiabatic, Direction direction) {
    const double den = direction == Direction::expansion ? work : work_adiabatic;
    const double num = direction == Direction::expansion ? work_adiabatic : work;
    if (den == 0.0) throw DivisionByZero("work efficiency denominator is zero");
    return num / den;
}

struct ThermoLedger {
    std::vector<double> t;
    std::vector<double> energy;
    std::vector<double> power;
    std::vector<double> work;
    std::vector<double> heat_current;
    std::vector<double> heat;
    std::vector<double> s_vn;
    std::vector<double> s_e;
    std::vector<double> delta_s_bath;
    std::vector<double> delta_s_universe;
    std::vector<double> sigma_dot;
    std::vector<double> purity;
    std::vector<double> t_eff;
    bool log_regularized{false};

    std::size_t size() const { return t.size(); }
    double first_law_defect(std::size_t i) const {
        return std::abs((energy[i] - energy[0]) - work[i] - heat[i]);
    }
};

// States along a Gibbs-sector trajectory in both pictures.
struct PictureStates {
    std::vector<Mat2> interaction;
    std::vector<Mat2> schrodinger;
    std::vector<std::size_t> grid_index;
};

inline PictureStates picture_states(const ControlProtocol& p, const GibbsTrajectory& traj, std::size_t stride) {
    const InertialPropagator prop(p);
    const BasisFrame frame0 = p.frame(0);
    PictureStates out;
    out.interaction.reserve(traj.t.size());
    out.schrodinger.reserve(traj.t.size());
    for (std::size_t n = 0; n < traj.t.size(); ++n) {
        const std::size_t i = n * stride;
        const EigenoperatorSet e = eigenoperators(p[i].mu, frame0);
        const Mat2 rho_tilde = state_from_parameters(traj.params[n], e).matrix();
        out.interaction.push_back(rho_tilde);
        out.schrodinger.push_back(schrodinger_state(rho_tilde, prop.at_index(i), frame0, p.frame(i)));
        out.grid_index.push_back(i);
    }
    return out;
}

// Work and heat increments use the midpoint split
//   dW = tr(rho_mid dH),  dQ = tr(H_mid d rho),
// whose sum telescopes to the energy change, so the first law closes to
// round-off. Power and heat current are reported from finite differences.
inline ThermoLedger build_ledger(const ControlProtocol& p, const GibbsTrajectory& traj, const BathSpec& bath,
                                 double dt = kDefaultStep) {
    const std::size_t stride = p.stride_for(dt);
    const PictureStates states = picture_states(p, traj, stride);
    const BasisFrame frame0 = p.frame(0);
    const std::size_t n = traj.t.size();
    const double h = static_cast<double>(stride) * p.spacing();

    ThermoLedger l;
    l.t = traj.t;
    auto resize = [n](std::vector<double>& v) { v.assign(n, 0.0); };
    for (auto* v : {&l.energy, &l.power, &l.work, &l.heat_current, &l.heat, &l.s_vn, &l.s_e, &l.delta_s_bath,
                    &l.delta_s_universe, &l.sigma_dot, &l.purity, &l.t_eff})
        resize(*v);

    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = states.grid_index[k];
        const Mat2& rho = states.schrodinger[k];
        const Mat2 hk = p.hamiltonian(i);
        l.energy[k] = (rho * hk).trace().real();
        l.power[k] = power(rho, p.hamiltonian_derivative(i));

        Mat2 rho_dot;
        if (n < 3) {
            rho_dot = Mat2::Zero();
        } else if (k == 0) {
            rho_dot = (-3.0 * states.schrodinger[0] + 4.0 * states.schrodinger[1] - states.schrodinger[2]) / (2.0 * h);
        } else if (k == n - 1) {
            rho_dot = (3.0 * states.schrodinger[n - 1] - 4.0 * states.schrodinger[n - 2] + states.schrodinger[n - 3]) /
                      (2.0 * h);
        } else {
            rho_dot = (states.schrodinger[k + 1] - states.schrodinger[k - 1]) / (2.0 * h);
        }
        l.heat_current[k] = heat_current(hk, rho_dot);

        if (k > 0) {
            const std::size_t j = states.grid_index[k - 1];
            const Mat2 h_prev = p.hamiltonian(j);
            const Mat2 rho_mid = 0.5 * (rho + states.schrodinger[k - 1]);
            const Mat2 h_mid = 0.5 * (hk + h_prev);
            l.work[k] = l.work[k - 1] + (rho_mid * (hk - h_prev)).trace().real();
            l.heat[k] = l.heat[k - 1] + (h_mid * (rho - states.schrodinger[k - 1])).trace().real();
        }

        l.s_vn[k] = von_neumann_entropy(rho);
        l.s_e[k] = energy_entropy(rho, hk);
        l.purity[k] = (rho * rho).trace().real();
        l.delta_s_bath[k] = -l.heat[k] / bath.temperature;
        l.delta_s_universe[k] = (l.s_vn[k] - l.s_vn[0]) + l.delta_s_bath[k];

        const double beta = traj.params[k].beta;
        l.t_eff[k] = beta < 0.0 ? effective_temperature(beta, p[i].rabi) : std::numeric_limits<double>::quiet_NaN();

        const EigenoperatorSet e = eigenoperators(p[i].mu, frame0);
        const RatePair rk = rates(p[i].alpha, bath);
        const Mat2& rho_tilde = states.interaction[k];
        const Mat2 attractor =
            state_from_parameters({instantaneous_attractor(p[i].alpha, bath.temperature), cd(0.0, 0.0)}, e).matrix();
        const EntropyProduction sp = entropy_production_rate(rho_tilde, attractor, dissipator_action(rho_tilde, e, rk));
        l.sigma_dot[k] = sp.rate;
        l.log_regularized = l.log_regularized || sp.regularized;
    }
    return l;
}

}  // namespace ste
