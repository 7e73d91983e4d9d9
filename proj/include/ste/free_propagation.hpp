// free_propagation.hpp: evolution of the isolated driven two-level system:
// the inertial Heisenberg map, an exact time-ordered propagator used as its
// oracle, picture conversions and state-distance metrics.

#pragma once

#include "ste/density.hpp"
#include "ste/errors.hpp"
#include "ste/protocol.hpp"
#include "ste/su2.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace ste {

// Cumulative trapezoidal integral of a per-sample quantity.
template <class F>
std::vector<double> cumulative_integral(const ControlProtocol& p, F&& field) {
    std::vector<double> out(p.size(), 0.0);
    for (std::size_t i = 1; i < p.size(); ++i)
        out[i] = out[i - 1] + 0.5 * p.spacing() * (field(p[i - 1]) + field(p[i]));
    return out;
}

// Value of a cumulative trapezoid at an arbitrary t, treating the integrand
// as linear inside each cell.
template <class F>
double integral_at(const ControlProtocol& p, const std::vector<double>& cumulative, double t, F&& field) {
    const double tol = 1e-9 * std::max(1.0, p.duration());
    if (t < -tol || t > p.duration() + tol)
        throw OutOfRange("t = " + std::to_string(t) + " outside protocol support");
    const double u = std::clamp(t / p.spacing(), 0.0, static_cast<double>(p.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(u), p.size() - 2);
    const double w = u - static_cast<double>(i);
    const double a = field(p[i]);
    const double b = field(p[i + 1]);
    return cumulative[i] + p.spacing() * (w * a + 0.5 * w * w * (b - a));
}

/// theta-bar(t) = integral of the generalized Rabi frequency from 0 to t.
inline double theta_bar(const ControlProtocol& p, double t) {
    auto rabi = [](const ProtocolSample& s) { return s.rabi; };
    return integral_at(p, cumulative_integral(p, rabi), t, rabi);
}

// Heisenberg-picture operator map v_i(t) = scale * sum_j coefficients(i, j) v_j(0)
// for v = (H, L, C).
struct HeisenbergFrame {
    double t{0.0};
    double scale{1.0};
    Mat3 coefficients{Mat3::Identity()};

    Mat2 op(int i, const BasisFrame& frame0) const {
        const std::array<Mat2, 3> v0 = frame0.operators();
        Mat2 out = Mat2::Zero();
        for (int j = 0; j < 3; ++j) out += coefficients(i, j) * v0[static_cast<std::size_t>(j)];
        return scale * out;
    }

    std::array<Mat2, 3> operators(const BasisFrame& frame0) const { return {op(0, frame0), op(1, frame0), op(2, frame0)}; }
};

struct InertialConditionReport {
    double max_ratio{0.0};
    double t_at_max{0.0};
    bool violated{false};
};

// max over the grid of |d mu/dt| / (2 kappa^2 rabi); the inertial solution
// needs this well below one.
inline InertialConditionReport inertial_condition(const ControlProtocol& p) {
    InertialConditionReport r;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        double mu_dot = 0.0;
        if (n >= 3) {
            if (i == 0)
                mu_dot = (-3.0 * p[0].mu + 4.0 * p[1].mu - p[2].mu) / (2.0 * p.spacing());
            else if (i == n - 1)
                mu_dot = (3.0 * p[n - 1].mu - 4.0 * p[n - 2].mu + p[n - 3].mu) / (2.0 * p.spacing());
            else
                mu_dot = (p[i + 1].mu - p[i - 1].mu) / (2.0 * p.spacing());
        }
        const double ratio = std::abs(mu_dot) / (2.0 * p[i].kappa * p[i].kappa * p[i].rabi);
        if (ratio > r.max_ratio) {
            r.max_ratio = ratio;
            r.t_at_max = p[i].t;
        }
    }
    r.violated = r.max_ratio >= 1.0;
    return r;
}

enum class InertialPolicy { record, raise };

// Inertial solution of the free dynamics for a sampled protocol. Cumulative
// phases are precomputed once; frames are then cheap to evaluate.
class InertialPropagator {
public:
    explicit InertialPropagator(const ControlProtocol& p, InertialPolicy policy = InertialPolicy::record)
        : protocol_(p),
          frame0_(p.frame(0)),
          theta_(cumulative_integral(p, [](const ProtocolSample& s) { return s.rabi; })),
          phase_(cumulative_integral(p, [](const ProtocolSample& s) { return s.alpha; })),
          condition_(inertial_condition(p)) {
        if (policy == InertialPolicy::raise && condition_.violated)
            throw InertialViolation("inertial condition violated at t = " + std::to_string(condition_.t_at_max),
                                    condition_.max_ratio);
    }

    const BasisFrame& frame0() const { return frame0_; }
    const InertialConditionReport& condition() const { return condition_; }
    double theta_bar_at_index(std::size_t i) const { return theta_[i]; }

    HeisenbergFrame at_index(std::size_t i) const {
        const ProtocolSample& s = protocol_[i];
        return make(s.t, s.mu, s.rabi, phase_[i]);
    }

    // mu and rabi interpolated linearly between grid points.
    HeisenbergFrame at(double t) const {
        const ProtocolSample s = protocol_.at(t);
        const double phase = integral_at(protocol_, phase_, t, [](const ProtocolSample& x) { return x.alpha; });
        return make(t, s.mu, s.rabi, phase);
    }

private:
    HeisenbergFrame make(double t, double mu, double rabi, double phase) const {
        const DiagonalizingPair vp = v_matrix(mu);
        Eigen::Vector3cd d;
        d << 1.0, std::exp(-I_unit * phase), std::exp(I_unit * phase);
        HeisenbergFrame f;
        f.t = t;
        f.scale = rabi / frame0_.rabi;
        f.coefficients = vp.V * d.asDiagonal() * vp.V_inv;
        return f;
    }

    const ControlProtocol& protocol_;
    BasisFrame frame0_;
    std::vector<double> theta_;
    std::vector<double> phase_;
    InertialConditionReport condition_;
};

inline HeisenbergFrame inertial_heisenberg(const ControlProtocol& p, double t,
                                           InertialPolicy policy = InertialPolicy::record) {
    return InertialPropagator(p, policy).at(t);
}

struct UnitaryPropagator {
    double t{0.0};
    Mat2 U{Mat2::Identity()};
};

// Midpoint exponential stepping U(t+dt) = exp(-i H(t+dt/2) dt) U(t). The
// midpoint Hamiltonian is read from the grid when dt spans an even number
// of cells, otherwise interpolated linearly.
inline std::vector<UnitaryPropagator> exact_propagate(const ControlProtocol& p, double dt) {
    const std::size_t stride = p.stride_for(dt);
    const double step = static_cast<double>(stride) * p.spacing();
    std::vector<UnitaryPropagator> out;
    out.reserve((p.size() - 1) / stride + 1);
    Mat2 u = Mat2::Identity();
    out.push_back({0.0, u});
    for (std::size_t i = 0; i + stride < p.size(); i += stride) {
        Mat2 h_mid;
        if (stride % 2 == 0) {
            h_mid = p.hamiltonian(i + stride / 2);
        } else {
            const ProtocolSample s = p.at(p[i].t + 0.5 * step);
            h_mid = s.omega * spin::sz() + s.epsilon * spin::sx();
        }
        u = expm2(-I_unit * step * h_mid) * u;
        out.push_back({p[i + stride].t, u});
    }
    return out;
}

// Heisenberg map induced by an exact propagator: coefficients of
// U^dag v_i(t) U in the basis v(0), divided by rabi(t)/rabi(0).
inline HeisenbergFrame exact_heisenberg(const Mat2& u, double t, const BasisFrame& frame0, const BasisFrame& frame_t) {
    const std::array<Mat2, 3> v0 = frame0.operators();
    const std::array<Mat2, 3> vt = frame_t.operators();
    HeisenbergFrame f;
    f.t = t;
    f.scale = frame_t.rabi / frame0.rabi;
    for (int i = 0; i < 3; ++i) {
        const Mat2 heis = u.adjoint() * vt[static_cast<std::size_t>(i)] * u;
        for (int j = 0; j < 3; ++j) {
            const Mat2& b = v0[static_cast<std::size_t>(j)];
            f.coefficients(i, j) = (b.adjoint() * heis).trace() / frame0.norm_squared() / f.scale;
        }
    }
    return f;
}

// Schrodinger-picture state from the interaction-picture state and a
// Heisenberg frame: <v_i(t)> = tr(rho~ v_i^H(t)), then
// rho = 1/2 + sum_i <v_i> v_i(t) / (rabi(t)^2 / 2).
inline Mat2 schrodinger_state(const Mat2& rho_tilde, const HeisenbergFrame& heis, const BasisFrame& frame0,
                              const BasisFrame& frame_t) {
    const std::array<Mat2, 3> vh = heis.operators(frame0);
    const std::array<Mat2, 3> vt = frame_t.operators();
    Mat2 rho = 0.5 * Mat2::Identity();
    for (std::size_t i = 0; i < 3; ++i) {
        const double expectation = (rho_tilde * vh[i]).trace().real();
        rho += expectation * vt[i] / frame_t.norm_squared();
    }
    return rho;
}

inline Mat2 to_schrodinger(const Mat2& rho_tilde, const Mat2& u) { return u * rho_tilde * u.adjoint(); }
inline Mat2 to_interaction(const Mat2& rho, const Mat2& u) { return u.adjoint() * rho * u; }

/// Uhlmann fidelity [tr sqrt(sqrt(r1) r2 sqrt(r1))]^2. For qubits this equals
/// tr(r1 r2) + 2 sqrt(det r1 det r2).
inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    const double overlap = (a.matrix() * b.matrix()).trace().real();
    const double da = std::max(a.matrix().determinant().real(), 0.0);
    const double db = std::max(b.matrix().determinant().real(), 0.0);
    return std::clamp(overlap + 2.0 * std::sqrt(da * db), 0.0, 1.0);
}

inline constexpr double kAccuracyCeiling = 16.0;

/// A = -log10(1 - F), clipped at 16 once 1 - F underflows.
inline double accuracy_from_fidelity(double f) {
    const double deficit = 1.0 - f;
    if (deficit <= std::pow(10.0, -kAccuracyCeiling)) return kAccuracyCeiling;
    return std::min(kAccuracyCeiling, -std::log10(deficit));
}

inline double accuracy(const DensityMatrix& rho_final, const DensityMatrix& rho_target) {
    return accuracy_from_fidelity(fidelity(rho_final, rho_target));
}

}  // namespace ste
