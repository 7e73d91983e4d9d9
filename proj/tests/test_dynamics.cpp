#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ste;
using ste::test::max_abs;
using ste::test::uniform;

namespace {

RatePair random_rates() {
    const double a = uniform(1.0, 15.0);
    return rates(a, {uniform(1.0, 10.0), uniform(0.02, 0.5)});
}

Mat2 unnormalized(double beta, cd gamma, const EigenoperatorSet& e) {
    const Mat2 left = expm2(gamma * e.sigma);
    return left * expm2(beta * e.xi) * left.adjoint();
}

Mat2 lindblad(const Mat2& rho, const EigenoperatorSet& e, const RatePair& k) {
    auto d = [&](const Mat2& a) {
        const Mat2 ada = a.adjoint() * a;
        return Mat2(a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada));
    };
    return k.k_down * d(e.sigma) + k.k_up * d(e.sigma_dag);
}

}  // namespace

TEST(RhsFull, ReducesToGibbsEquationWithoutCoherence) {
    for (int n = 0; n < 200; ++n) {
        const double beta = uniform(-8, 3);
        const double mu = uniform(-2, 2);
        const RatePair k = random_rates();
        const GibbsDerivative d = rhs_full(beta, 0.0, mu, k);
        EXPECT_EQ(d.gamma_dot, cd(0.0, 0.0));
        EXPECT_NEAR(d.beta_dot, rhs_gibbs(beta, kappa(mu), k), 1e-13 * std::max(1.0, std::abs(d.beta_dot)));
    }
}

TEST(RhsFull, FixedPointAndNoBath) {
    for (int n = 0; n < 100; ++n) {
        const double a = uniform(1, 20);
        const BathSpec bath{uniform(1, 10), 0.1};
        const GibbsDerivative d = rhs_full(instantaneous_attractor(a, bath.temperature), 0.0, 0.0, rates(a, bath));
        EXPECT_NEAR(d.beta_dot, 0.0, 1e-13);
        EXPECT_EQ(d.gamma_dot, cd(0.0, 0.0));
    }
    const GibbsDerivative still = rhs_full(-1.3, cd(0.2, -0.4), 0.7, RatePair{0.0, 0.0});
    EXPECT_EQ(still.beta_dot, 0.0);
    EXPECT_EQ(still.gamma_dot, cd(0.0, 0.0));
    EXPECT_THROW(rhs_full(51.0, 0.0, 0.0, RatePair{1.0, 1.0}), Overflow);
}

// Oracle: the canonical form differentiated numerically must reproduce the
// Lindbladian applied to the state (up to the normalization direction).
TEST(RhsFull, MatchesLindbladianByFiniteDifferences) {
    for (int n = 0; n < 40; ++n) {
        const double beta = uniform(-4, 1);
        const cd gamma(uniform(-1.5, 1.5), uniform(-1.5, 1.5));
        const double mu = uniform(-1.5, 1.5);
        const RatePair k = random_rates();
        const BasisFrame f = BasisFrame::make(uniform(1, 10), uniform(-5, 5));
        const EigenoperatorSet e = eigenoperators(mu, f);
        const GibbsDerivative d = rhs_full(beta, gamma, mu, k);

        const double h = 1e-6;
        auto rho_at = [&](double s) {
            const Mat2 m = unnormalized(beta + s * d.beta_dot, gamma + s * d.gamma_dot, e);
            return Mat2(m / m.trace());
        };
        const Mat2 fd = (rho_at(h) - rho_at(-h)) / (2 * h);
        const Mat2 exact = lindblad(rho_at(0.0), e, k);
        EXPECT_LT(max_abs(fd - exact), 1e-7 * std::max(1.0, max_abs(exact)));
    }
}

TEST(RhsGibbs, Examples) {
    const double a = 5.0;
    const BathSpec bath{5.0, 0.1};
    EXPECT_NEAR(rhs_gibbs(instantaneous_attractor(a, 5.0), 1.0, rates(a, bath)), 0.0, 1e-14);
    EXPECT_GT(rhs_gibbs(-40.0, 1.3, rates(a, bath)), 1e10);
    const RatePair cold{0.0, 0.3};
    EXPECT_NEAR(rhs_gibbs(-0.5, 1.0, cold), -0.3 * (std::exp(-0.5) + 1.0) / 4.0, 1e-15);
    EXPECT_LT(rhs_gibbs(-0.5, 1.0, cold), 0.0);
    EXPECT_THROW(rhs_gibbs(-50.5, 1.0, cold), Overflow);
}

TEST(RhsGibbs, ContractsTowardAttractor) {
    for (int n = 0; n < 500; ++n) {
        const double a = uniform(0.5, 20);
        const BathSpec bath{uniform(0.5, 10), uniform(0.01, 1)};
        const double beta = uniform(-30, 10);
        const double target = instantaneous_attractor(a, bath.temperature);
        const double rate = rhs_gibbs(beta, kappa(uniform(-2, 2)), rates(a, bath));
        if (std::abs(beta - target) > 1e-9) EXPECT_EQ(rate > 0.0, target > beta);
    }
}

TEST(Attractor, Examples) {
    EXPECT_DOUBLE_EQ(instantaneous_attractor(5.0, 5.0), -1.0);
    EXPECT_DOUBLE_EQ(instantaneous_attractor(effective_frequency(0.0, 12.0), 5.0), -12.0 / 5.0);
}

TEST(StateFromParameters, Examples) {
    const BasisFrame f = BasisFrame::make(6.0, 0.0);
    const DensityMatrix mixed = state_from_parameters({0.0, 0.0}, eigenoperators(0.3, f));
    EXPECT_LT(max_abs(mixed.matrix() - 0.5 * Mat2::Identity()), 1e-15);

    const double beta = -1.7;
    const DensityMatrix th = state_from_parameters({beta, 0.0}, eigenoperators(0.0, f));
    const DensityMatrix oracle = DensityMatrix::thermal(f.H, -f.rabi / beta);
    EXPECT_LT(max_abs(th.matrix() - oracle.matrix()), 1e-14);

    for (int n = 0; n < 100; ++n) {
        const BasisFrame g = BasisFrame::make(uniform(-10, 10), uniform(-10, 10));
        const EigenoperatorSet e = eigenoperators(uniform(-3, 3), g);
        const DensityMatrix rho = state_from_parameters({uniform(-10, 5), cd(uniform(-2, 2), uniform(-2, 2))}, e);
        EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
        EXPECT_LT(hermiticity_defect(rho.matrix()), 1e-14);
        EXPECT_GE(rho.eigenvalues()(0), -1e-12);
    }
    // without coherence the state commutes with xi
    const EigenoperatorSet e = eigenoperators(0.8, f);
    const Mat2 r = state_from_parameters({-2.0, 0.0}, e).matrix();
    EXPECT_LT(max_abs(r * e.xi - e.xi * r), 1e-14);
}

TEST(Integrate, StaticProtocolRelaxesLikeRateEquation) {
    const double rabi = 5.0;
    const BathSpec bath{5.0, 0.1};
    const ControlProtocol p = ControlProtocol::constant(rabi, 0.0, 40.0, 80001);
    const double beta0 = -4.0;
    const GibbsTrajectory traj = integrate({beta0, 0.0}, p, bath);
    // populations: p_up' = (k_up p_down - k_down p_up) / 4 with ||sigma||^2 = 1/4
    const RatePair k = rates(rabi, bath);
    const double p_eq = k.k_up / (k.k_up + k.k_down);
    const double p0 = std::exp(beta0) / (1.0 + std::exp(beta0));
    for (std::size_t n = 0; n < traj.t.size(); n += 997) {
        const double pu = p_eq + (p0 - p_eq) * std::exp(-(k.k_up + k.k_down) * traj.t[n] / 4.0);
        EXPECT_NEAR(traj.params[n].beta, std::log(pu / (1.0 - pu)), 1e-9);
    }
    EXPECT_NEAR(traj.params.back().beta, -rabi / bath.temperature, 1e-3);
}

TEST(Integrate, GammaStaysExactlyZero) {
    const SynthesisResult r = synthesize(preset_config("pe"));
    const GibbsTrajectory traj = integrate({-12.0 / 5.0, 0.0}, r.protocol, BathSpec{}, preset_config("pe").step());
    for (const GibbsParameters& g : traj.params) EXPECT_EQ(g.gamma, cd(0.0, 0.0));
}

TEST(Integrate, StepHalvingSelfConvergence) {
    SynthesisConfig c = preset_config("pc");
    c.dt = 5e-4;  // 4 grid cells per step of ~1e-3
    const SynthesisResult r = synthesize(c);
    const double h = r.protocol.spacing();
    ASSERT_EQ((r.protocol.size() - 1) % 4, 0u);
    const GibbsTrajectory coarse = integrate({-1.0, 0.0}, r.protocol, c.bath(), 4.0 * h);
    const GibbsTrajectory fine = integrate({-1.0, 0.0}, r.protocol, c.bath(), 2.0 * h);
    EXPECT_LT(std::abs(coarse.params.back().beta - fine.params.back().beta), 1e-9);
}

TEST(Integrate, StepTooLarge) {
    const ControlProtocol p = ControlProtocol::constant(5.0, 0.0, 20.0, 41);
    EXPECT_THROW(integrate({-9.0, 0.0}, p, BathSpec{5.0, 40.0}, 1.0), StepTooLarge);
}

TEST(Integrate, NearlyPureStartUsesExponentialVariable) {
    const ControlProtocol p = ControlProtocol::constant(5.0, 0.0, 20.0, 20001);
    const GibbsTrajectory traj = integrate({-60.0, 0.0}, p, BathSpec{5.0, 0.1});
    EXPECT_TRUE(traj.used_y_form);
    for (const GibbsParameters& g : traj.params) EXPECT_TRUE(std::isfinite(g.beta));
    EXPECT_GT(traj.params.back().beta, -2.0);
}

// Coherent sector against the oracle on a constant-mu drive, where the
// parameterization and the comoving Liouville integration are both exact.
TEST(Integrate, CoherentStartMatchesOracle) {
    const std::size_t n = 20001;
    const double spacing = 5e-4;
    std::vector<double> rabi(n, 6.0), phi(n), phi_dot(n, 1.5);
    for (std::size_t i = 0; i < n; ++i) phi[i] = 1.5 * spacing * static_cast<double>(i);
    const ControlProtocol p = ControlProtocol::from_phase(spacing, rabi, phi, phi_dot);
    ASSERT_NEAR(p[0].mu, -0.25, 1e-15);
    const BathSpec bath{5.0, 0.1};
    const double step = 1e-3;
    const GibbsParameters start{-1.2, cd(0.3, -0.2)};
    const EigenoperatorSet e = eigenoperators(p[0].mu, p.frame(0));
    const GibbsTrajectory traj = integrate(start, p, bath, step);
    const StateTrajectory oracle = superoperator_integrate(state_from_parameters(start, e), p, bath, step);
    ASSERT_EQ(oracle.rho.size(), traj.params.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.t.size(); ++k)
        worst = std::max(worst, trace_distance(state_from_parameters(traj.params[k], e), oracle.rho[k]));
    EXPECT_LT(worst, 1e-6);
    EXPECT_LT(std::abs(traj.params.back().gamma), std::abs(start.gamma));
}

TEST(Superoperator, AgreesWithParameterizedTrajectory) {
    const SynthesisConfig c = preset_config("pe");
    const SynthesisResult r = synthesize(c);
    const ControlProtocol& p = r.protocol;
    const GibbsTrajectory traj = integrate({-12.0 / 5.0, 0.0}, p, c.bath(), c.step());
    const EigenoperatorSet e0 = eigenoperators(0.0, p.frame(0));
    const StateTrajectory oracle = superoperator_integrate(state_from_parameters(traj.params[0], e0), p, c.bath(), c.step());
    ASSERT_EQ(oracle.rho.size(), traj.params.size());
    const std::size_t stride = p.stride_for(c.step());
    for (std::size_t n = 0; n < traj.t.size(); ++n) {
        const EigenoperatorSet e = eigenoperators(p[n * stride].mu, p.frame(0));
        EXPECT_LT(trace_distance(state_from_parameters(traj.params[n], e), oracle.rho[n]), 1e-6);
    }
    EXPECT_LT(oracle.max_trace_error, 1e-10);
    EXPECT_GE(oracle.min_eigenvalue, -1e-9);
}

TEST(Superoperator, LiteralFrameTransportStaysPhysical) {
    const SynthesisConfig c = preset_config("pc");
    const SynthesisResult r = synthesize(c);
    const EigenoperatorSet e0 = eigenoperators(0.0, r.protocol.frame(0));
    const StateTrajectory s =
        superoperator_integrate(state_from_parameters({-1.0, 0.0}, e0), r.protocol, c.bath(), c.step(),
                                FrameTransport::fixed);
    EXPECT_LT(s.max_trace_error, 1e-10);
    EXPECT_GE(s.min_eigenvalue, -1e-9);
}

TEST(Superoperator, ZeroRatesAndThermalization) {
    const ControlProtocol p = ControlProtocol::constant(5.0, 0.0, 60.0, 120001);
    const DensityMatrix rho0(ste::test::random_state());
    const StateTrajectory hot = superoperator_integrate(rho0, p, BathSpec{5.0, 1e-300});
    EXPECT_LT(trace_distance(hot.rho.back(), rho0), 1e-12);

    const StateTrajectory relaxed = superoperator_integrate(rho0, p, BathSpec{5.0, 0.2});
    const DensityMatrix gibbs = DensityMatrix::thermal(p.hamiltonian(0), 5.0);
    EXPECT_LT(trace_distance(relaxed.rho.back(), gibbs), 1e-4);
}

TEST(Superoperator, PositivityLossOnUnstableStep) {
    const ControlProtocol p = ControlProtocol::constant(5.0, 0.0, 20.0, 41);
    Mat2 excited = Mat2::Zero();
    excited(0, 0) = 1.0;
    EXPECT_THROW(superoperator_integrate(DensityMatrix(excited), p, BathSpec{5.0, 40.0}, 1.0), PositivityLoss);
}

TEST(Dissipator, GeneratorMatchesDirectAction) {
    for (int n = 0; n < 20; ++n) {
        const Mat2 a = ste::test::random_matrix();
        const Mat2 rho = ste::test::random_state();
        const Mat2 ada = a.adjoint() * a;
        const Mat2 direct = a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada);
        EXPECT_LT(max_abs(unvec(dissipator_generator(a) * vec(rho)) - direct), 1e-14);
    }
}
