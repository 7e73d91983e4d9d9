// name_dynamics.hpp: open-system dynamics of the driven qubit in the
// interaction picture. The state is kept in the generalized canonical form
//   rho~ = Z^-1 exp(gamma sigma) exp(beta xi) exp(gamma* sigma^dag)
// and (beta, gamma) are integrated with fixed-step RK4. A direct
// Liouville-space integrator serves as the oracle.

#pragma once

#include "ste/bath.hpp"
#include "ste/density.hpp"
#include "ste/errors.hpp"
#include "ste/protocol.hpp"
#include "ste/su2.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace ste {

inline constexpr double kBetaOverflow = 50.0;
inline constexpr double kDefaultStep = 1e-3;
inline constexpr double kStepErrorLimit = 1e-6;
inline constexpr double kPositivityLimit = 1e-6;

struct GibbsParameters {
    double beta{0.0};
    cd gamma{0.0, 0.0};
};

struct GibbsDerivative {
    double beta_dot{0.0};
    cd gamma_dot{0.0, 0.0};
};

inline void check_overflow(double beta) {
    if (std::abs(beta) > kBetaOverflow)
        throw Overflow("|beta| = " + std::to_string(std::abs(beta)) + " exceeds " + std::to_string(kBetaOverflow));
}

/// beta-dot = (k_up (1 + e^-beta) - k_down (e^beta + 1)) / (4 kappa^2)
inline double rhs_gibbs(double beta, double kappa, const RatePair& k) {
    check_overflow(beta);
    return (k.k_up * (1.0 + std::exp(-beta)) - k.k_down * (std::exp(beta) + 1.0)) / (4.0 * kappa * kappa);
}

// Same equation for y = e^beta; regular as beta -> +-infinity.
inline double rhs_gibbs_y(double y, double kappa, const RatePair& k) {
    return (k.k_up * (y + 1.0) - k.k_down * (y * y + y)) / (4.0 * kappa * kappa);
}

// gamma-dot is proportional to gamma; its conjugate is substituted into the
// beta equation.
inline GibbsDerivative rhs_full(double beta, cd gamma, double mu, const RatePair& k) {
    check_overflow(beta);
    const double k2 = 1.0 + mu * mu;
    const double k4 = k2 * k2;
    const double g2 = std::norm(gamma);
    const double eb = std::exp(beta);
    const double emb = std::exp(-beta);

    GibbsDerivative d;
    d.gamma_dot = k.k_down * gamma / (8.0 * k2) -
                  k.k_up * gamma * (2.0 * (1.0 + 2.0 * emb) * k2 + g2) / (16.0 * k4);
    const double coupling = (gamma * eb / (2.0 * k2) * std::conj(d.gamma_dot)).real();
    d.beta_dot = coupling - k.k_down * (4.0 * k2 * (eb + 1.0) + g2 * eb) / (16.0 * k4) +
                 k.k_up * (g2 + 4.0 * k2 * emb) * (4.0 * (eb + 1.0) * k2 + eb * g2) / (64.0 * k4 * k2);
    return d;
}

/// Root of the Gibbs equation: beta = -alpha / T_B.
inline double instantaneous_attractor(double alpha, double bath_temperature) {
    return -alpha / bath_temperature;
}

inline DensityMatrix state_from_parameters(const GibbsParameters& p, const EigenoperatorSet& eig,
                                           StateTolerance tol = {}) {
    const Mat2 left = expm2(p.gamma * eig.sigma);
    const Mat2 unnormalized = left * expm2(p.beta * eig.xi) * left.adjoint();
    const cd z = unnormalized.trace();
    if (!(std::abs(z) > 0.0) || !std::isfinite(std::abs(z)))
        throw InvalidState("partition function is not finite and positive");
    return DensityMatrix(unnormalized / z.real(), tol);
}

// Protocol values at the start, middle and end of one integrator step. Middle
// values come from the grid when the step spans an even number of cells.
struct StepSamples {
    ProtocolSample start;
    ProtocolSample mid;
    ProtocolSample end;
};

inline StepSamples step_samples(const ControlProtocol& p, std::size_t i, std::size_t stride) {
    StepSamples s;
    s.start = p[i];
    s.end = p[i + stride];
    s.mid = stride % 2 == 0 ? p[i + stride / 2] : p.at(0.5 * (s.start.t + s.end.t));
    return s;
}

struct GibbsTrajectory {
    std::vector<double> t;
    std::vector<GibbsParameters> params;
    std::vector<double> mu;
    double max_step_error{0.0};
    bool used_y_form{false};
};

namespace detail {

struct RateSample {
    double mu;
    double kappa;
    RatePair k;
};

inline RateSample rate_sample(const ProtocolSample& s, const BathSpec& bath) {
    return {s.mu, s.kappa, rates(s.alpha, bath)};
}

inline GibbsParameters axpy(const GibbsParameters& x, double h, const GibbsDerivative& d) {
    return {x.beta + h * d.beta_dot, x.gamma + h * d.gamma_dot};
}

inline GibbsParameters rk4_full(const GibbsParameters& x, double h, const RateSample& a, const RateSample& m,
                                const RateSample& b) {
    const GibbsDerivative k1 = rhs_full(x.beta, x.gamma, a.mu, a.k);
    const GibbsParameters x2 = axpy(x, 0.5 * h, k1);
    const GibbsDerivative k2 = rhs_full(x2.beta, x2.gamma, m.mu, m.k);
    const GibbsParameters x3 = axpy(x, 0.5 * h, k2);
    const GibbsDerivative k3 = rhs_full(x3.beta, x3.gamma, m.mu, m.k);
    const GibbsParameters x4 = axpy(x, h, k3);
    const GibbsDerivative k4 = rhs_full(x4.beta, x4.gamma, b.mu, b.k);
    return {x.beta + h / 6.0 * (k1.beta_dot + 2.0 * k2.beta_dot + 2.0 * k3.beta_dot + k4.beta_dot),
            x.gamma + h / 6.0 * (k1.gamma_dot + 2.0 * k2.gamma_dot + 2.0 * k3.gamma_dot + k4.gamma_dot)};
}

template <class F>
double rk4_scalar(double x, double h, F&& f) {
    const double k1 = f(x, 0);
    const double k2 = f(x + 0.5 * h * k1, 1);
    const double k3 = f(x + 0.5 * h * k2, 1);
    const double k4 = f(x + h * k3, 2);
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// gamma = 0 sector. Switches to y = e^beta once |beta| passes the overflow
// guard; `y_form` records the switch.
inline double rk4_gibbs(double beta, double h, const RateSample (&s)[3], bool& y_form) {
    if (std::abs(beta) <= kBetaOverflow) {
        const double next = rk4_scalar(beta, h, [&](double b, int j) {
            return (s[j].k.k_up * (1.0 + std::exp(-b)) - s[j].k.k_down * (std::exp(b) + 1.0)) /
                   (4.0 * s[j].kappa * s[j].kappa);
        });
        if (std::isfinite(next) && std::abs(next) <= 2.0 * kBetaOverflow) return next;
    }
    y_form = true;
    const double y = rk4_scalar(std::exp(beta), h, [&](double y0, int j) { return rhs_gibbs_y(y0, s[j].kappa, s[j].k); });
    if (!(y > 0.0)) throw StepTooLarge("y = e^beta left the positive axis; reduce the step");
    return std::log(y);
}

// e^beta / (1 + e^beta) without overflow
inline double population(double beta) {
    return beta < 0.0 ? std::exp(beta) / (1.0 + std::exp(beta)) : 1.0 / (1.0 + std::exp(-beta));
}

inline double estimate_error(double two_half, double one_full) { return std::abs(two_half - one_full) / 15.0; }

}  // namespace detail

// Fixed-step RK4 over the protocol grid. Every pair of steps is checked
// against a single double-length step; the Richardson estimate of the local
// error must stay below 1e-6.
inline GibbsTrajectory integrate(const GibbsParameters& initial, const ControlProtocol& p, const BathSpec& bath,
                                 double dt = kDefaultStep) {
    bath.validate();
    const std::size_t stride = p.stride_for(dt);
    const double h = static_cast<double>(stride) * p.spacing();
    const bool gibbs_only = initial.gamma == cd(0.0, 0.0);

    GibbsTrajectory out;
    const std::size_t steps = (p.size() - 1) / stride;
    out.t.reserve(steps + 1);
    out.params.reserve(steps + 1);
    out.mu.reserve(steps + 1);
    out.t.push_back(p[0].t);
    out.params.push_back(initial);
    out.mu.push_back(p[0].mu);

    auto step = [&](const GibbsParameters& x, std::size_t i, std::size_t span, double hh) {
        const StepSamples ss = step_samples(p, i, span);
        const detail::RateSample s[3] = {detail::rate_sample(ss.start, bath), detail::rate_sample(ss.mid, bath),
                                         detail::rate_sample(ss.end, bath)};
        if (gibbs_only) return GibbsParameters{detail::rk4_gibbs(x.beta, hh, s, out.used_y_form), cd(0.0, 0.0)};
        return detail::rk4_full(x, hh, s[0], s[1], s[2]);
    };

    GibbsParameters x = initial;
    for (std::size_t n = 0; n < steps; ++n) {
        const std::size_t i = n * stride;
        const GibbsParameters next = step(x, i, stride, h);
        if (n % 2 == 0 && n + 1 < steps) {
            const GibbsParameters two = step(next, i + stride, stride, h);
            const GibbsParameters one = step(x, i, 2 * stride, 2.0 * h);
            // measured on the excited population, which stays meaningful for nearly pure states
            double err = detail::estimate_error(detail::population(two.beta), detail::population(one.beta));
            err = std::max(err, std::abs(two.gamma - one.gamma) / 15.0);
            out.max_step_error = std::max(out.max_step_error, err);
            if (err > kStepErrorLimit)
                throw StepTooLarge("local error estimate " + std::to_string(err) + " at t = " +
                                   std::to_string(p[i].t) + " exceeds " + std::to_string(kStepErrorLimit));
        }
        x = next;
        if (!std::isfinite(x.beta) || !std::isfinite(std::abs(x.gamma)))
            throw Overflow("integration diverged at t = " + std::to_string(p[i + stride].t));
        out.t.push_back(p[i + stride].t);
        out.params.push_back(x);
        out.mu.push_back(p[i + stride].mu);
    }
    return out;
}

// Liouville-space generator of D[A] rho = A rho A^dag - {A^dag A, rho}/2 for
// column-major vec, using vec(A X B) = (B^T kron A) vec(X).
inline Mat4 dissipator_generator(const Mat2& a) {
    const Mat2 ada = a.adjoint() * a;
    const Mat2 id = Mat2::Identity();
    return kron(a.conjugate(), a) - 0.5 * kron(id, ada) - 0.5 * kron(ada.transpose(), id);
}

enum class FrameTransport {
    // Jump operators follow mu(t) as a rotation of the frame-0 ladder
    // operators; the rotation itself carries no generator term.
    comoving,
    // Literal reading: D[sigma(mu(t))] acting on rho~ with no frame change.
    fixed,
};

struct StateTrajectory {
    std::vector<double> t;
    std::vector<DensityMatrix> rho;
    double min_eigenvalue{0.0};
    double max_trace_error{0.0};
};

inline StateTrajectory superoperator_integrate(const DensityMatrix& rho0, const ControlProtocol& p,
                                               const BathSpec& bath, double dt = kDefaultStep,
                                               FrameTransport transport = FrameTransport::comoving) {
    bath.validate();
    const std::size_t stride = p.stride_for(dt);
    const double h = static_cast<double>(stride) * p.spacing();
    const BasisFrame frame0 = p.frame(0);
    const EigenoperatorSet base = eigenoperators(0.0, frame0);
    const Mat4 d_down0 = dissipator_generator(base.sigma);
    const Mat4 d_up0 = dissipator_generator(base.sigma_dag);

    auto generator = [&](const ProtocolSample& s) -> Mat4 {
        const RatePair k = rates(s.alpha, bath);
        if (transport == FrameTransport::comoving) {
            const double k2 = s.kappa * s.kappa;
            return (k.k_down / k2) * d_down0 + (k.k_up / k2) * d_up0;
        }
        const EigenoperatorSet e = eigenoperators(s.mu, frame0);
        return k.k_down * dissipator_generator(e.sigma) + k.k_up * dissipator_generator(e.sigma_dag);
    };
    auto rotation = [&](double mu) {
        return transport == FrameTransport::comoving ? comoving_rotation(mu, frame0) : Mat2(Mat2::Identity());
    };

    StateTolerance tol;
    tol.eigenvalue = kPositivityLimit;
    tol.trace = 1e-8;

    StateTrajectory out;
    const std::size_t steps = (p.size() - 1) / stride;
    out.t.reserve(steps + 1);
    out.rho.reserve(steps + 1);

    auto record = [&](double t, const Mat2& rho_tilde) {
        const double min_eig = eigh2(rho_tilde).values(0);
        out.min_eigenvalue = std::min(out.min_eigenvalue, min_eig);
        out.max_trace_error = std::max(out.max_trace_error, std::abs(rho_tilde.trace() - 1.0));
        if (min_eig < -kPositivityLimit)
            throw PositivityLoss("eigenvalue " + std::to_string(min_eig) + " at t = " + std::to_string(t));
        out.t.push_back(t);
        out.rho.emplace_back(rho_tilde, tol);
    };

    const Mat2 r0 = rotation(p[0].mu);
    Vec4 x = vec(r0.adjoint() * rho0.matrix() * r0);
    record(p[0].t, rho0.matrix());
    for (std::size_t n = 0; n < steps; ++n) {
        const std::size_t i = n * stride;
        const StepSamples ss = step_samples(p, i, stride);
        const Mat4 ga = generator(ss.start);
        const Mat4 gm = generator(ss.mid);
        const Mat4 gb = generator(ss.end);
        const Vec4 k1 = ga * x;
        const Vec4 k2 = gm * (x + 0.5 * h * k1);
        const Vec4 k3 = gm * (x + 0.5 * h * k2);
        const Vec4 k4 = gb * (x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const Mat2 r = rotation(ss.end.mu);
        record(ss.end.t, hermitian_part(r * unvec(x) * r.adjoint()));
    }
    return out;
}

}  // namespace ste
