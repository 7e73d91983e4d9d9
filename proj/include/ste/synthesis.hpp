// synthesis.hpp: reverse-engineered shortcut-to-equilibrium protocols.
//
// y = e^beta follows a quintic fixed by the thermal endpoints; the phase of
// the drive is a fixed cubic; at every grid point the effective frequency
// alpha is recovered by inverting the Gibbs-sector equation of motion.

#pragma once

#include "ste/bath.hpp"
#include "ste/errors.hpp"
#include "ste/name_dynamics.hpp"
#include "ste/protocol.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ste {

inline constexpr double kReferenceRabi = 5.0;
inline const double kReferencePeriod = 2.0 * M_PI / kReferenceRabi;
inline const double kDefaultDuration = 6.0 * kReferencePeriod;

inline constexpr std::size_t kMinimumSteps = 50;

// Integrator steps covering `duration` with steps no longer than dt; at least
// kMinimumSteps so that short protocols still get a usable grid.
inline std::size_t steps_for(double duration, double dt) {
    if (!(duration > 0.0) || !(dt > 0.0)) throw InvalidConfig("duration and step must be positive");
    const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
    return std::max(steps, kMinimumSteps);
}

// Uniform grid with spacing step/2 so that RK4 midpoints are grid samples.
inline std::size_t grid_points_for(double duration, double dt) { return 2 * steps_for(duration, dt) + 1; }

struct SynthesisConfig {
    double rabi_i{12.0};
    double rabi_f{5.0};
    double temp_i{5.0};
    double temp_f{5.0};
    double temp_bath{kDefaultBathTemperature};
    double tf{kDefaultDuration};
    std::optional<double> phase_a;  // default 10 / tf^2
    std::optional<double> phase_b;  // default -2 / (3 tf)
    std::size_t grid_points{0};     // 0: derived from the integrator step
    double dt{kDefaultStep};
    double rate_prefactor{kDefaultRatePrefactor};

    double a() const { return phase_a.value_or(10.0 / (tf * tf)); }
    double b() const { return phase_b.value_or(-2.0 / (3.0 * tf)); }
    std::size_t points() const { return grid_points != 0 ? grid_points : grid_points_for(tf, dt); }

    // Integrator step actually used: two grid cells when the cell count is
    // even, otherwise one.
    double step() const {
        const std::size_t cells = points() - 1;
        const double spacing = tf / static_cast<double>(cells);
        return cells % 2 == 0 ? 2.0 * spacing : spacing;
    }
    BathSpec bath() const { return {temp_bath, rate_prefactor}; }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) throw InvalidConfig(std::string(name) + " must be positive");
        };
        positive(rabi_i, "rabi_i");
        positive(rabi_f, "rabi_f");
        positive(temp_i, "temp_i");
        positive(temp_f, "temp_f");
        positive(temp_bath, "temp_bath");
        positive(tf, "tf");
        positive(dt, "dt");
        positive(rate_prefactor, "rate_prefactor");
        if (points() < 100) throw InvalidConfig("grid_points must be at least 100");
    }
};

struct EndpointConditions {
    double y{1.0};
    double y_dot{0.0};
    double y_ddot{0.0};
};

struct BoundaryConditions {
    EndpointConditions initial;
    EndpointConditions final;
    double duration{1.0};
};

// Stationary thermal endpoint at frequency rabi and temperature T: beta-dot
// from the Gibbs equation with alpha = rabi, kappa = 1, and beta-ddot from
// its time derivative with alpha held fixed.
inline EndpointConditions endpoint_conditions(double rabi, double temperature, const BathSpec& bath) {
    const double beta = -rabi / temperature;
    const RatePair k = rates(rabi, bath);
    const double beta_dot = rhs_gibbs(beta, 1.0, k);
    const double beta_ddot = beta_dot * (-k.k_up * std::exp(-beta) - k.k_down * std::exp(beta)) / 4.0;
    const double y = std::exp(beta);
    return {y, y * beta_dot, y * (beta_ddot + beta_dot * beta_dot)};
}

inline BoundaryConditions boundary_conditions(const SynthesisConfig& c) {
    c.validate();
    const BathSpec bath = c.bath();
    return {endpoint_conditions(c.rabi_i, c.temp_i, bath), endpoint_conditions(c.rabi_f, c.temp_f, bath), c.tf};
}

// y(t) = sum_k c_k s^k with s = t / duration. Working in s keeps the linear
// system well conditioned for any duration.
class QuinticAnsatz {
public:
    QuinticAnsatz() = default;
    QuinticAnsatz(std::array<double, 6> normalized, double duration) : c_(normalized), duration_(duration) {}

    double duration() const { return duration_; }
    const std::array<double, 6>& normalized() const { return c_; }

    // b_k with y(t) = sum_k b_k t^k.
    std::array<double, 6> coefficients() const {
        std::array<double, 6> b{};
        for (std::size_t k = 0; k < 6; ++k) b[k] = c_[k] / std::pow(duration_, static_cast<double>(k));
        return b;
    }

    // d^order y / dt^order.
    double eval(double t, int order = 0) const {
        const double s = t / duration_;
        double acc = 0.0;
        for (int k = 5; k >= order; --k) {
            double falling = 1.0;
            for (int j = 0; j < order; ++j) falling *= static_cast<double>(k - j);
            acc = acc * s + falling * c_[static_cast<std::size_t>(k)];
        }
        return acc / std::pow(duration_, static_cast<double>(order));
    }

private:
    std::array<double, 6> c_{};
    double duration_{1.0};
};

// Fits the quintic and checks y > 0 on `check_points` uniform samples.
inline QuinticAnsatz quintic_fit(const BoundaryConditions& bc, std::size_t check_points = 1001) {
    if (!(bc.duration > 0.0)) throw SingularSystem("quintic fit needs a positive duration");
    const double d = bc.duration;
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> rhs;
    // s = 0: c0, c1, 2 c2
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    m(2, 2) = 2.0;
    // s = 1: sum c_k, sum k c_k, sum k (k-1) c_k
    for (int k = 0; k < 6; ++k) {
        m(3, k) = 1.0;
        m(4, k) = k;
        m(5, k) = k * (k - 1);
    }
    rhs << bc.initial.y, bc.initial.y_dot * d, bc.initial.y_ddot * d * d, bc.final.y, bc.final.y_dot * d,
        bc.final.y_ddot * d * d;
    const Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(m);
    if (!lu.isInvertible()) throw SingularSystem("quintic boundary system is singular");
    const Eigen::Matrix<double, 6, 1> c = lu.solve(rhs);
    std::array<double, 6> out{};
    for (std::size_t k = 0; k < 6; ++k) out[k] = c(static_cast<Eigen::Index>(k));
    const QuinticAnsatz q(out, d);
    for (std::size_t i = 0; i < check_points; ++i) {
        const double t = d * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(check_points - 1, 1));
        if (!(q.eval(t) > 0.0))
            throw NonPositiveAnsatz("y = e^beta reaches " + std::to_string(q.eval(t)) + " at t = " + std::to_string(t));
    }
    return q;
}

struct PhaseValue {
    double phi{0.0};
    double phi_dot{0.0};
};

/// Phi = a (t^2 + b t^3).
inline PhaseValue phase(const SynthesisConfig& c, double t) {
    const double tol = 1e-9 * std::max(1.0, c.tf);
    if (t < -tol || t > c.tf + tol) throw OutOfRange("phase: t outside [0, tf]");
    const double a = c.a();
    const double b = c.b();
    return {a * (t * t + b * t * t * t), a * (2.0 * t + 3.0 * b * t * t)};
}

struct AlphaSolution {
    double alpha{0.0};
    double residual{0.0};
    int sign_changes{0};
    bool multiple_roots{false};
};

// Right-hand side of the Gibbs equation as a function of alpha once Phi-dot
// is fixed: 1/kappa^2 = 1 - Phi-dot^2 / alpha^2.
inline double gibbs_rate_at(double alpha, double beta, double phi_dot, const BathSpec& bath) {
    const double inv_k2 = 1.0 - (phi_dot * phi_dot) / (alpha * alpha);
    const RatePair k = rates(alpha, bath);
    return 0.25 * inv_k2 * (k.k_up * (1.0 + std::exp(-beta)) - k.k_down * (1.0 + std::exp(beta)));
}

inline constexpr int kAlphaScanPoints = 400;

// Root of F(alpha) = beta-dot - rate(alpha) on (|Phi-dot|, alpha_max]. The
// rate vanishes at alpha = |Phi-dot|, may rise to a maximum and then falls
// without bound, so a heating target has two roots. The largest one is the
// branch continuous with the adiabatic limit and is returned.
inline AlphaSolution solve_alpha(double t, double beta, double beta_dot, double phi_dot, const BathSpec& bath,
                                 double alpha_max) {
    auto f = [&](double a) { return beta_dot - gibbs_rate_at(a, beta, phi_dot, bath); };
    const double lower = std::abs(phi_dot) > 0.0 ? std::abs(phi_dot) * (1.0 + 1e-9) : 1e-9 * alpha_max;
    if (!(alpha_max > lower)) throw NoRoot("alpha search interval is empty", t);

    // log-spaced scan; the last sign change is the largest root
    const double ratio = std::log(alpha_max / lower);
    std::array<double, kAlphaScanPoints + 1> grid{};
    std::array<double, kAlphaScanPoints + 1> values{};
    for (int j = 0; j <= kAlphaScanPoints; ++j) {
        grid[j] = j == kAlphaScanPoints ? alpha_max : lower * std::exp(ratio * j / kAlphaScanPoints);
        values[j] = f(grid[j]);
    }
    int changes = 0;
    int top = -1;
    for (int j = 0; j < kAlphaScanPoints; ++j) {
        if ((values[j] < 0.0) != (values[j + 1] < 0.0)) {
            ++changes;
            top = j;
        }
    }
    if (top < 0)
        throw NoRoot("no alpha reproduces beta-dot = " + std::to_string(beta_dot) + " at t = " + std::to_string(t), t);
    double lo = grid[top];
    double f_lo = values[top];
    double hi = grid[top + 1];
    double f_hi = values[top + 1];

    AlphaSolution sol;
    sol.sign_changes = changes;
    sol.multiple_roots = changes > 1;
    // bisection to a tight bracket, then secant steps kept inside it
    for (int it = 0; it < 60 && (hi - lo) > 1e-10 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    double x0 = lo;
    double f0 = f_lo;
    double x1 = hi;
    double f1 = f_hi;
    for (int it = 0; it < 50 && std::abs(f1) >= 1e-12; ++it) {
        if (f1 == f0) break;
        double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 > std::min(lo, hi) && x2 < std::max(lo, hi))) x2 = 0.5 * (lo + hi);
        const double f2 = f(x2);
        if ((f2 < 0.0) == (f_lo < 0.0)) {
            lo = x2;
            f_lo = f2;
        } else {
            hi = x2;
            f_hi = f2;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }
    if (std::abs(f_lo) < std::abs(f1)) {
        x1 = lo;
        f1 = f_lo;
    }
    if (std::abs(f_hi) < std::abs(f1)) {
        x1 = hi;
        f1 = f_hi;
    }
    sol.alpha = x1;
    sol.residual = f1;
    return sol;
}

struct SynthesisResult {
    ControlProtocol protocol;
    QuinticAnsatz ansatz;
    BoundaryConditions boundary;
    std::vector<double> beta;
    std::vector<double> beta_dot;
    double max_residual{0.0};
    std::size_t multiple_root_points{0};
};

inline SynthesisResult synthesize(const SynthesisConfig& c) {
    c.validate();
    const BathSpec bath = c.bath();
    SynthesisResult r;
    r.boundary = boundary_conditions(c);
    r.ansatz = quintic_fit(r.boundary, c.points());

    const std::size_t n = c.points();
    const double spacing = c.tf / static_cast<double>(n - 1);
    const double alpha_max = 100.0 * std::max(c.rabi_i, c.rabi_f);
    std::vector<double> rabi(n);
    std::vector<double> phi(n);
    std::vector<double> phi_dot(n);
    r.beta.resize(n);
    r.beta_dot.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = i + 1 == n ? c.tf : static_cast<double>(i) * spacing;
        const double y = r.ansatz.eval(t);
        if (!(y > 0.0))
            throw NonPositiveAnsatz("y = e^beta reaches " + std::to_string(y) + " at t = " + std::to_string(t));
        r.beta[i] = std::log(y);
        r.beta_dot[i] = r.ansatz.eval(t, 1) / y;
        const PhaseValue ph = phase(c, t);
        phi[i] = ph.phi;
        phi_dot[i] = ph.phi_dot;
        const AlphaSolution s = solve_alpha(t, r.beta[i], r.beta_dot[i], ph.phi_dot, bath, alpha_max);
        r.max_residual = std::max(r.max_residual, std::abs(s.residual));
        if (s.multiple_roots) ++r.multiple_root_points;
        rabi[i] = std::sqrt(std::max(s.alpha * s.alpha - ph.phi_dot * ph.phi_dot, 0.0));
        if (!(rabi[i] > 0.0)) throw NoRoot("recovered Rabi frequency vanishes", t);
    }
    r.protocol = ControlProtocol::from_phase(spacing, rabi, phi, phi_dot);
    return r;
}

// Sudden jump to the final Hamiltonian at t = 0+, then constant driving.
inline ControlProtocol quench_protocol(const SynthesisConfig& c) {
    c.validate();
    return ControlProtocol::constant(c.rabi_f, 0.0, c.tf, c.points());
}

inline double partition_function(double rabi, double temperature) { return 2.0 * std::cosh(rabi / (2.0 * temperature)); }

/// Quasi-static isothermal work -T_B ln(Z_f / Z_i).
inline double adiabatic_work(const SynthesisConfig& c) {
    if (std::abs(c.temp_i - c.temp_bath) > 1e-12 * c.temp_bath)
        throw InvalidConfig("adiabatic work needs temp_i equal to the bath temperature");
    const double x_i = c.rabi_i / (2.0 * c.temp_bath);
    const double x_f = c.rabi_f / (2.0 * c.temp_bath);
    // ln cosh(x) = x + log1p(e^{-2x}) - ln 2, stable for large x
    auto log_cosh = [](double x) { return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0); };
    return -c.temp_bath * (log_cosh(x_f) - log_cosh(x_i));
}

enum class Direction { expansion, compression };

inline Direction direction_of(const SynthesisConfig& c) {
    return c.rabi_f < c.rabi_i ? Direction::expansion : Direction::compression;
}

struct Preset {
    const char* name;
    const char* label;
    double rabi_i;
    double rabi_f;
    double temp_i;
    double temp_f;
};

// Expansion lowers the frequency 12 -> 5, compression raises it 5 -> 12.
inline const std::array<Preset, 5>& presets() {
    static const std::array<Preset, 5> table{{
        {"pe", "expansion", 12.0, 5.0, 5.0, 5.0},
        {"pc", "compression", 5.0, 12.0, 5.0, 5.0},
        {"pe1", "expansion, hot start", 12.0, 5.0, 15.0, 5.0},
        {"pe2", "expansion, cold start", 12.0, 5.0, 4.0, 5.0},
        {"pec", "expansion with cooling", 12.0, 5.0, 5.0, 4.0},
    }};
    return table;
}

// Builds a config from a preset row. `table_orientation` swaps the endpoint
// frequencies (expansion listed as 5 -> 12).
inline SynthesisConfig preset_config(const std::string& name, bool table_orientation = false) {
    for (const Preset& p : presets()) {
        if (name == p.name) {
            SynthesisConfig c;
            c.rabi_i = table_orientation ? p.rabi_f : p.rabi_i;
            c.rabi_f = table_orientation ? p.rabi_i : p.rabi_f;
            c.temp_i = p.temp_i;
            c.temp_f = p.temp_f;
            return c;
        }
    }
    throw InvalidConfig("unknown preset '" + name + "'");
}

}  // namespace ste
