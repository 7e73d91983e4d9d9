#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ste;
using ste::test::max_abs;
using ste::test::uniform;

namespace {

struct PresetRun {
    SynthesisConfig config;
    SynthesisResult synthesis;
    GibbsTrajectory trajectory;
    ThermoLedger ledger;
};

PresetRun run_preset(const std::string& name, double tf = kDefaultDuration) {
    PresetRun r;
    r.config = ste::test::preset(name, tf);
    r.synthesis = synthesize(r.config);
    r.trajectory = integrate({-r.config.rabi_i / r.config.temp_i, 0.0}, r.synthesis.protocol, r.config.bath(),
                             r.config.step());
    r.ledger = build_ledger(r.synthesis.protocol, r.trajectory, r.config.bath(), r.config.step());
    return r;
}

}  // namespace

TEST(Entropy, VonNeumannExamples) {
    Mat2 d = Mat2::Zero();
    d(0, 0) = 0.9;
    d(1, 1) = 0.1;
    EXPECT_NEAR(von_neumann_entropy(d), -0.9 * std::log(0.9) - 0.1 * std::log(0.1), 1e-15);
    EXPECT_NEAR(von_neumann_entropy(d), 0.3250829733914482, 1e-14);
    EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed()), std::log(2.0), 1e-15);
    Mat2 pure = Mat2::Zero();
    pure(0, 0) = 1.0;
    EXPECT_EQ(von_neumann_entropy(pure), 0.0);
    // unitary invariance
    const Mat2 u = expm2(-I_unit * 0.7 * spin::sx());
    EXPECT_NEAR(von_neumann_entropy(Mat2(u * d * u.adjoint())), von_neumann_entropy(d), 1e-14);
}

TEST(Entropy, EnergyEntropyBoundsVonNeumann) {
    const Mat2 h = 3.0 * spin::sz() + 1.0 * spin::sx();
    const DensityMatrix th = DensityMatrix::thermal(h, 2.0);
    EXPECT_NEAR(energy_entropy(th, h), von_neumann_entropy(th), 1e-13);
    for (int n = 0; n < 200; ++n) {
        const Mat2 rho = ste::test::random_state();
        EXPECT_GE(energy_entropy(rho, h), von_neumann_entropy(rho) - 1e-13);
    }
    EXPECT_THROW(energy_entropy(th, Mat2::Identity()), DegenerateHamiltonian);
}

TEST(Power, Examples) {
    const Mat2 rho = ste::test::random_state();
    EXPECT_EQ(power(rho, Mat2::Zero()), 0.0);
    EXPECT_NEAR(power(0.5 * Mat2::Identity(), 2.0 * spin::sz() + spin::sx()), 0.0, 1e-16);
    EXPECT_NEAR(power(rho, spin::sz()), (rho * spin::sz()).trace().real(), 1e-16);
}

TEST(HeatCurrent, IsolatedEvolutionCarriesNoHeat) {
    for (int n = 0; n < 50; ++n) {
        const Mat2 h = uniform(1, 5) * spin::sz() + uniform(-3, 3) * spin::sx();
        const Mat2 rho = ste::test::random_state();
        const Mat2 rho_dot = -I_unit * (h * rho - rho * h);
        EXPECT_NEAR(heat_current(h, rho_dot), 0.0, 1e-13);
    }
}

TEST(HeatCurrent, SignFollowsRelaxation) {
    const BathSpec bath{5.0, 0.1};
    // hotter than the bath: energy flows out
    const ControlProtocol p = ControlProtocol::constant(5.0, 0.0, 10.0, 10001);
    const GibbsTrajectory hot = integrate({-0.2, 0.0}, p, bath);
    const ThermoLedger lh = build_ledger(p, hot, bath);
    EXPECT_LT(lh.heat.back(), 0.0);
    EXPECT_NEAR(lh.work.back(), 0.0, 1e-14);
    // colder than the bath: energy flows in
    const GibbsTrajectory cold = integrate({-3.0, 0.0}, p, bath);
    EXPECT_GT(build_ledger(p, cold, bath).heat.back(), 0.0);
}

TEST(EntropyProduction, VanishesAtAttractor) {
    for (int n = 0; n < 50; ++n) {
        const double mu = uniform(-1, 1);
        const BasisFrame f = BasisFrame::make(uniform(1, 10), uniform(-3, 3));
        const EigenoperatorSet e = eigenoperators(mu, f);
        const double a = effective_frequency(mu, f.rabi);
        const BathSpec bath{uniform(1, 8), 0.1};
        const Mat2 att = state_from_parameters({instantaneous_attractor(a, bath.temperature), 0.0}, e).matrix();
        const Mat2 dot = dissipator_action(att, e, rates(a, bath));
        EXPECT_LT(max_abs(dot), 1e-13);
        EXPECT_NEAR(entropy_production_rate(att, att, dot).rate, 0.0, 1e-13);
    }
}

TEST(EntropyProduction, NonNegativeForRandomStates) {
    for (int n = 0; n < 200; ++n) {
        const double mu = uniform(-1, 1);
        const BasisFrame f = BasisFrame::make(uniform(1, 10), uniform(-3, 3));
        const EigenoperatorSet e = eigenoperators(mu, f);
        const double a = effective_frequency(mu, f.rabi);
        const BathSpec bath{uniform(1, 8), 0.1};
        const Mat2 att = state_from_parameters({instantaneous_attractor(a, bath.temperature), 0.0}, e).matrix();
        const Mat2 rho = ste::test::random_state();
        const EntropyProduction s = entropy_production_rate(rho, att, dissipator_action(rho, e, rates(a, bath)));
        EXPECT_GE(s.rate, -1e-12);
        EXPECT_FALSE(s.regularized);
    }
}

TEST(EntropyProduction, CoolingPresetEndsOutOfEquilibrium) {
    const PresetRun r = run_preset("pec");
    EXPECT_GT(r.ledger.sigma_dot.back(), 0.0);
}

// Oracle: at mu = 0 the sigma norms are 1/2 and the squared form reduces to
// integral (k_down^2 + k_up^2) dt.
TEST(SpeedLimit, StaticProtocolClosedForm) {
    const BathSpec bath{5.0, 0.1};
    const ControlProtocol p = ControlProtocol::constant(7.0, 0.0, 3.0, 3001);
    const RatePair k = rates(7.0, bath);
    EXPECT_NEAR(speed_limit_bound(p, bath), (k.k_down * k.k_down + k.k_up * k.k_up) * 3.0, 1e-12);
    EXPECT_NEAR(speed_limit_bound(p, bath, SpeedLimitForm::linear), (k.k_down + k.k_up) * 3.0, 1e-12);
}

// Oracle: ||sigma(mu)||^2 = 1/(4 kappa^2) so the integrand is
// (k_down^2 + k_up^2) / kappa^2.
TEST(SpeedLimit, SynthesizedProtocolMatchesAnalyticIntegrand) {
    const SynthesisConfig c = ste::test::preset("pe");
    const SynthesisResult s = synthesize(c);
    const ControlProtocol& p = s.protocol;
    double acc = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        auto f = [&](std::size_t j) {
            const RatePair k = rates(p[j].alpha, c.bath());
            return (k.k_down * k.k_down + k.k_up * k.k_up) / std::pow(kappa(p[j].mu), 2);
        };
        acc += 0.5 * p.spacing() * (f(i - 1) + f(i));
    }
    EXPECT_NEAR(speed_limit_bound(p, c.bath()), acc, 1e-10 * acc);
}

TEST(SpeedLimit, BoundsPurityChangeForPresets) {
    for (const Preset& pr : presets()) {
        const PresetRun r = run_preset(pr.name);
        const double change = std::abs(std::log(r.ledger.purity.back() / r.ledger.purity.front()));
        EXPECT_GE(speed_limit_bound(r.synthesis.protocol, r.config.bath()), change) << pr.name;
    }
}

TEST(SpeedLimit, BoundsPurityChangeForRandomConfigs) {
    int checked = 0;
    for (int n = 0; n < 60 && checked < 20; ++n) {
        SynthesisConfig c;
        c.rabi_i = uniform(4, 14);
        c.rabi_f = uniform(4, 14);
        c.temp_bath = uniform(3, 8);
        c.temp_i = c.temp_bath;
        c.temp_f = c.temp_bath;
        c.tf = uniform(6, 12) * kReferencePeriod;
        try {
            const SynthesisResult s = synthesize(c);
            const GibbsTrajectory traj = integrate({-c.rabi_i / c.temp_i, 0.0}, s.protocol, c.bath(), c.step());
            const ThermoLedger l = build_ledger(s.protocol, traj, c.bath(), c.step());
            const double change = std::abs(std::log(l.purity.back() / l.purity.front()));
            EXPECT_GE(speed_limit_bound(s.protocol, c.bath()), change);
            ++checked;
        } catch (const NoRoot&) {
        }
    }
    EXPECT_EQ(checked, 20);
}

TEST(EffectiveTemperature, Examples) {
    EXPECT_DOUBLE_EQ(effective_temperature(-1.0, 5.0), 5.0);
    EXPECT_DOUBLE_EQ(effective_temperature(-2.4, 12.0), 5.0);
    EXPECT_THROW(effective_temperature(0.0, 5.0), NonThermalState);
    EXPECT_THROW(effective_temperature(0.3, 5.0), NonThermalState);
}

TEST(WorkEfficiency, Examples) {
    EXPECT_DOUBLE_EQ(work_efficiency(4.0, 3.0, Direction::expansion), 0.75);
    EXPECT_DOUBLE_EQ(work_efficiency(-1.0, -2.0, Direction::compression), 0.5);
    EXPECT_THROW(work_efficiency(0.0, 3.0, Direction::expansion), DivisionByZero);
    EXPECT_THROW(work_efficiency(1.0, 0.0, Direction::compression), DivisionByZero);
}

TEST(Ledger, InvariantsForPresets) {
    for (const Preset& pr : presets()) {
        const PresetRun r = run_preset(pr.name);
        const ThermoLedger& l = r.ledger;
        const double scale = std::max({1.0, std::abs(l.energy.front()), std::abs(l.energy.back())});
        for (std::size_t k = 0; k < l.size(); ++k) {
            EXPECT_LT(l.first_law_defect(k), 1e-6 * scale) << pr.name << " k=" << k;
            EXPECT_GE(l.sigma_dot[k], -1e-9) << pr.name << " k=" << k;
            EXPECT_GE(l.s_e[k], l.s_vn[k] - 1e-10) << pr.name << " k=" << k;
        }
        EXPECT_GE(l.delta_s_universe.back(), 0.0) << pr.name;
        EXPECT_NEAR(l.s_e.front(), l.s_vn.front(), 1e-10) << pr.name;
        EXPECT_NEAR(l.s_e.back(), l.s_vn.back(), 1e-6) << pr.name;
        EXPECT_FALSE(l.log_regularized) << pr.name;
    }
}

TEST(Ledger, EnergyMatchesDirectExpectation) {
    const PresetRun r = run_preset("pc");
    const ControlProtocol& p = r.synthesis.protocol;
    const std::size_t last = r.ledger.size() - 1;
    const DensityMatrix th = DensityMatrix::thermal(p.hamiltonian(0), r.config.temp_i);
    EXPECT_NEAR(r.ledger.energy[0], (th.matrix() * p.hamiltonian(0)).trace().real(), 1e-12);
    // final energy close to the Gibbs value of the final Hamiltonian
    const DensityMatrix tf = DensityMatrix::thermal(p.hamiltonian(p.size() - 1), r.config.temp_f);
    EXPECT_NEAR(r.ledger.energy[last], (tf.matrix() * p.hamiltonian(p.size() - 1)).trace().real(), 5e-2);
}

// Power integrates to the telescoped work.
TEST(Ledger, PowerIntegratesToWork) {
    const PresetRun r = run_preset("pe");
    const ThermoLedger& l = r.ledger;
    double w = 0.0;
    for (std::size_t k = 1; k < l.size(); ++k) w += 0.5 * (l.t[k] - l.t[k - 1]) * (l.power[k] + l.power[k - 1]);
    EXPECT_NEAR(w, l.work.back(), 1e-4 * std::abs(l.work.back()));
}

TEST(Ledger, CompressionWorkConvergesToAdiabaticLimit) {
    SynthesisConfig base = ste::test::preset("pc");
    base.dt = 4e-3;
    const double w_adi = adiabatic_work(base);
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double periods : {8.0, 16.0, 32.0, 64.0}) {
        SynthesisConfig c = base;
        c.tf = periods * kReferencePeriod;
        const SynthesisResult s = synthesize(c);
        const GibbsTrajectory traj = integrate({-c.rabi_i / c.temp_i, 0.0}, s.protocol, c.bath(), c.step());
        const ThermoLedger l = build_ledger(s.protocol, traj, c.bath(), c.step());
        const double gap = std::abs(l.work.back() - w_adi);
        EXPECT_LT(gap, prev_gap) << periods;
        prev_gap = gap;
    }
}
