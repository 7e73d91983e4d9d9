// protocol.hpp: driving protocols sampled on a uniform time grid

#pragma once

#include "ste/errors.hpp"
#include "ste/su2.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace ste {

struct ProtocolSample {
    double t{0.0};
    double omega{0.0};
    double epsilon{0.0};
    double rabi{0.0};
    double phi{0.0};
    double phi_dot{0.0};
    double mu{0.0};
    double kappa{1.0};
    double alpha{0.0};
};

class ControlProtocol {
public:
    ControlProtocol() = default;

    // Samples from (rabi, Phi, Phi-dot): omega = rabi cos Phi, epsilon = rabi sin Phi,
    // mu = -Phi-dot / rabi, alpha = kappa rabi.
    static ControlProtocol from_phase(double spacing, const std::vector<double>& rabi,
                                      const std::vector<double>& phi, const std::vector<double>& phi_dot) {
        if (rabi.size() != phi.size() || rabi.size() != phi_dot.size())
            throw InvalidConfig("protocol arrays differ in length");
        ControlProtocol p(spacing, rabi.size());
        for (std::size_t i = 0; i < rabi.size(); ++i) {
            if (!(rabi[i] > 0.0)) throw DegenerateFrequency();
            ProtocolSample& s = p.samples_[i];
            s.t = static_cast<double>(i) * spacing;
            s.rabi = rabi[i];
            s.phi = phi[i];
            s.phi_dot = phi_dot[i];
            s.omega = rabi[i] * std::cos(phi[i]);
            s.epsilon = rabi[i] * std::sin(phi[i]);
            s.mu = -phi_dot[i] / rabi[i];
            s.kappa = ste::kappa(s.mu);
            s.alpha = s.kappa * s.rabi;
        }
        return p;
    }

    // Samples from raw fields; time derivatives by centered differences
    // (one-sided second order at the ends).
    static ControlProtocol from_fields(double spacing, const std::vector<double>& omega,
                                       const std::vector<double>& epsilon) {
        if (omega.size() != epsilon.size()) throw InvalidConfig("protocol arrays differ in length");
        ControlProtocol p(spacing, omega.size());
        const std::vector<double> omega_dot = derivative(omega, spacing);
        const std::vector<double> epsilon_dot = derivative(epsilon, spacing);
        double unwrap = 0.0;
        for (std::size_t i = 0; i < omega.size(); ++i) {
            ProtocolSample& s = p.samples_[i];
            s.t = static_cast<double>(i) * spacing;
            s.omega = omega[i];
            s.epsilon = epsilon[i];
            s.rabi = generalized_rabi(omega[i], epsilon[i]);
            double phi = std::atan2(epsilon[i], omega[i]) + unwrap;
            if (i > 0) {
                while (phi - p.samples_[i - 1].phi > M_PI) { phi -= 2.0 * M_PI; unwrap -= 2.0 * M_PI; }
                while (phi - p.samples_[i - 1].phi < -M_PI) { phi += 2.0 * M_PI; unwrap += 2.0 * M_PI; }
            }
            s.phi = phi;
            s.mu = adiabatic_parameter(omega[i], epsilon[i], omega_dot[i], epsilon_dot[i]);
            s.phi_dot = -s.mu * s.rabi;
            s.kappa = ste::kappa(s.mu);
            s.alpha = s.kappa * s.rabi;
        }
        return p;
    }

    static ControlProtocol constant(double omega, double epsilon, double duration, std::size_t points) {
        if (points < 2) throw InvalidConfig("protocol needs at least two samples");
        return from_fields(duration / static_cast<double>(points - 1), std::vector<double>(points, omega),
                           std::vector<double>(points, epsilon));
    }

    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    double spacing() const { return spacing_; }
    double duration() const { return samples_.empty() ? 0.0 : samples_.back().t; }

    const ProtocolSample& operator[](std::size_t i) const { return samples_[i]; }
    const ProtocolSample& front() const { return samples_.front(); }
    const ProtocolSample& back() const { return samples_.back(); }
    const std::vector<ProtocolSample>& samples() const { return samples_; }

    BasisFrame frame(std::size_t i) const { return BasisFrame::make(samples_[i].omega, samples_[i].epsilon); }

    Mat2 hamiltonian(std::size_t i) const {
        return samples_[i].omega * spin::sz() + samples_[i].epsilon * spin::sx();
    }

    // d(omega S_z + epsilon S_x)/dt by centered differences on the grid.
    Mat2 hamiltonian_derivative(std::size_t i) const {
        const std::size_t n = samples_.size();
        double wd = 0.0;
        double ed = 0.0;
        if (n >= 3) {
            if (i == 0) {
                wd = (-3.0 * samples_[0].omega + 4.0 * samples_[1].omega - samples_[2].omega) / (2.0 * spacing_);
                ed = (-3.0 * samples_[0].epsilon + 4.0 * samples_[1].epsilon - samples_[2].epsilon) / (2.0 * spacing_);
            } else if (i == n - 1) {
                wd = (3.0 * samples_[n - 1].omega - 4.0 * samples_[n - 2].omega + samples_[n - 3].omega) / (2.0 * spacing_);
                ed = (3.0 * samples_[n - 1].epsilon - 4.0 * samples_[n - 2].epsilon + samples_[n - 3].epsilon) / (2.0 * spacing_);
            } else {
                wd = (samples_[i + 1].omega - samples_[i - 1].omega) / (2.0 * spacing_);
                ed = (samples_[i + 1].epsilon - samples_[i - 1].epsilon) / (2.0 * spacing_);
            }
        }
        return wd * spin::sz() + ed * spin::sx();
    }

    // Linear interpolation of every field; exact at grid points.
    ProtocolSample at(double t) const {
        if (samples_.empty()) throw OutOfRange("empty protocol");
        const double tol = 1e-9 * std::max(1.0, duration());
        if (t < -tol || t > duration() + tol)
            throw OutOfRange("t = " + std::to_string(t) + " outside [0, " + std::to_string(duration()) + "]");
        if (samples_.size() == 1) return samples_.front();
        const double u = std::clamp(t / spacing_, 0.0, static_cast<double>(samples_.size() - 1));
        const auto i = std::min(static_cast<std::size_t>(u), samples_.size() - 2);
        const double w = u - static_cast<double>(i);
        if (w == 0.0) return samples_[i];
        const ProtocolSample& a = samples_[i];
        const ProtocolSample& b = samples_[i + 1];
        auto lerp = [w](double x, double y) { return x + w * (y - x); };
        ProtocolSample s;
        s.t = t;
        s.omega = lerp(a.omega, b.omega);
        s.epsilon = lerp(a.epsilon, b.epsilon);
        s.rabi = lerp(a.rabi, b.rabi);
        s.phi = lerp(a.phi, b.phi);
        s.phi_dot = lerp(a.phi_dot, b.phi_dot);
        s.mu = lerp(a.mu, b.mu);
        s.kappa = ste::kappa(s.mu);
        s.alpha = lerp(a.alpha, b.alpha);
        return s;
    }

    // Number of grid intervals per integrator step dt; dt must be a whole
    // multiple of the grid spacing.
    std::size_t stride_for(double dt) const {
        if (!(dt > 0.0)) throw InvalidConfig("step must be positive");
        const double ratio = dt / spacing_;
        const double rounded = std::round(ratio);
        if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-6 * ratio)
            throw InvalidConfig("step " + std::to_string(dt) + " is not a multiple of the grid spacing " +
                                std::to_string(spacing_));
        const auto stride = static_cast<std::size_t>(rounded);
        if ((samples_.size() - 1) % stride != 0)
            throw InvalidConfig("step does not divide the protocol duration");
        return stride;
    }

private:
    ControlProtocol(double spacing, std::size_t n) : spacing_(spacing), samples_(n) {
        if (!(spacing > 0.0)) throw InvalidConfig("grid spacing must be positive");
        if (n < 2) throw InvalidConfig("protocol needs at least two samples");
    }

    static std::vector<double> derivative(const std::vector<double>& f, double h) {
        const std::size_t n = f.size();
        std::vector<double> d(n, 0.0);
        if (n < 3) return d;
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        return d;
    }

    double spacing_{1.0};
    std::vector<ProtocolSample> samples_;
};

}  // namespace ste
