// experiments.hpp: configuration, end-to-end runs, duration sweeps and
// serialization behind the command-line tool.

#pragma once

#include "ste/bath.hpp"
#include "ste/density.hpp"
#include "ste/errors.hpp"
#include "ste/free_propagation.hpp"
#include "ste/name_dynamics.hpp"
#include "ste/synthesis.hpp"
#include "ste/thermo.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace ste {

using json = nlohmann::json;

struct RunConfig {
    std::string name{"custom"};
    SynthesisConfig synthesis;
    bool verify{false};
    bool table_orientation{false};
    std::string outdir{"."};
    std::vector<double> tf_list;
};

inline const std::set<std::string>& config_keys() {
    static const std::set<std::string> keys{"preset", "rabi_i", "rabi_f", "temp_i", "temp_f", "temp_bath",
                                            "tf", "phase_a", "phase_b", "grid_points", "dt", "rate_prefactor",
                                            "verify", "outdir", "table_orientation", "tf_list"};
    return keys;
}

// Preset rows are applied first; explicit keys then override them.
inline RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw InvalidConfig("config must be a JSON object");
    for (const auto& item : doc.items())
        if (!config_keys().count(item.key())) throw InvalidConfig("unknown config key '" + item.key() + "'");

    auto number = [&](const char* key) -> std::optional<double> {
        if (!doc.contains(key)) return std::nullopt;
        if (!doc[key].is_number()) throw InvalidConfig(std::string(key) + " must be a number");
        return doc[key].get<double>();
    };
    auto boolean = [&](const char* key, bool fallback) {
        if (!doc.contains(key)) return fallback;
        if (!doc[key].is_boolean()) throw InvalidConfig(std::string(key) + " must be a boolean");
        return doc[key].get<bool>();
    };

    RunConfig rc;
    rc.table_orientation = boolean("table_orientation", false);
    rc.verify = boolean("verify", false);
    if (doc.contains("preset")) {
        if (!doc["preset"].is_string()) throw InvalidConfig("preset must be a string");
        rc.name = doc["preset"].get<std::string>();
        rc.synthesis = preset_config(rc.name, rc.table_orientation);
    }
    SynthesisConfig& c = rc.synthesis;
    if (auto v = number("rabi_i")) c.rabi_i = *v;
    if (auto v = number("rabi_f")) c.rabi_f = *v;
    if (auto v = number("temp_i")) c.temp_i = *v;
    if (auto v = number("temp_f")) c.temp_f = *v;
    if (auto v = number("temp_bath")) c.temp_bath = *v;
    if (auto v = number("tf")) c.tf = *v;
    if (auto v = number("phase_a")) c.phase_a = *v;
    if (auto v = number("phase_b")) c.phase_b = *v;
    if (auto v = number("dt")) c.dt = *v;
    if (auto v = number("rate_prefactor")) c.rate_prefactor = *v;
    if (doc.contains("grid_points")) {
        if (!doc["grid_points"].is_number_unsigned()) throw InvalidConfig("grid_points must be a positive integer");
        c.grid_points = doc["grid_points"].get<std::size_t>();
    }
    if (doc.contains("outdir")) {
        if (!doc["outdir"].is_string()) throw InvalidConfig("outdir must be a string");
        rc.outdir = doc["outdir"].get<std::string>();
    }
    if (doc.contains("tf_list")) {
        if (!doc["tf_list"].is_array()) throw InvalidConfig("tf_list must be an array");
        for (const auto& v : doc["tf_list"]) {
            if (!v.is_number()) throw InvalidConfig("tf_list entries must be numbers");
            rc.tf_list.push_back(v.get<double>());
        }
    }
    c.validate();
    return rc;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config file " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("malformed config: ") + e.what());
    }
    return parse_config(doc);
}

struct RunReport {
    double fidelity{0.0};
    double accuracy{0.0};
    double accuracy_quench{0.0};
    double work{0.0};
    double heat{0.0};
    double energy_change{0.0};
    double delta_s_universe{0.0};
    std::optional<double> work_adiabatic;
    std::optional<double> efficiency;
    double purity_initial{0.0};
    double purity_final{0.0};
    double log_purity_ratio{0.0};
    double speed_limit_bound{0.0};
    double t_eff_initial{0.0};
    double t_eff_final{0.0};
    double closed_loop_error{0.0};
    double inertial_ratio{0.0};
    bool inertial_violation{false};
    double max_first_law_defect{0.0};
    double min_sigma_dot{0.0};
    double min_entropy_gap{0.0};
    std::size_t multiple_root_points{0};
    double max_step_error{0.0};
    std::optional<double> oracle_trace_distance;
    std::optional<double> oracle_min_eigenvalue;
};

struct RunResult {
    std::string name;
    SynthesisConfig config;
    SynthesisResult synthesis;
    GibbsTrajectory trajectory;
    ThermoLedger ledger;
    std::vector<Eigen::Vector3d> spin;
    RunReport report;
};

// Interaction-picture state at t_f mapped back with the exact propagator and
// compared with the Gibbs state of the final Hamiltonian at `temperature`.
inline double final_fidelity(const ControlProtocol& p, const GibbsTrajectory& traj, double step, double temperature) {
    const std::vector<UnitaryPropagator> u = exact_propagate(p, step);
    const EigenoperatorSet e = eigenoperators(p.back().mu, p.frame(0));
    const Mat2 rho_tilde = state_from_parameters(traj.params.back(), e).matrix();
    const DensityMatrix target = DensityMatrix::thermal(p.hamiltonian(p.size() - 1), temperature);
    return fidelity(DensityMatrix(to_schrodinger(rho_tilde, u.back().U)), target);
}

// Passive baseline: jump to the final Hamiltonian, then relax for tf.
inline double quench_accuracy(const SynthesisConfig& c) {
    const ControlProtocol q = quench_protocol(c);
    const GibbsTrajectory traj = integrate({-c.rabi_i / c.temp_i, cd(0.0, 0.0)}, q, c.bath(), c.step());
    return accuracy_from_fidelity(final_fidelity(q, traj, c.step(), c.temp_f));
}

inline RunResult execute(const RunConfig& rc) {
    const SynthesisConfig& c = rc.synthesis;
    c.validate();
    const BathSpec bath = c.bath();
    const double step = c.step();

    RunResult r;
    r.name = rc.name;
    r.config = c;
    r.synthesis = synthesize(c);
    const ControlProtocol& p = r.synthesis.protocol;
    const std::size_t stride = p.stride_for(step);
    r.trajectory = integrate({-c.rabi_i / c.temp_i, cd(0.0, 0.0)}, p, bath, step);
    r.ledger = build_ledger(p, r.trajectory, bath, step);

    RunReport& rep = r.report;
    rep.fidelity = final_fidelity(p, r.trajectory, step, c.temp_f);
    rep.accuracy = accuracy_from_fidelity(rep.fidelity);
    rep.accuracy_quench = quench_accuracy(c);

    const ThermoLedger& l = r.ledger;
    const std::size_t last = l.size() - 1;
    rep.work = l.work[last];
    rep.heat = l.heat[last];
    rep.energy_change = l.energy[last] - l.energy[0];
    rep.delta_s_universe = l.delta_s_universe[last];
    if (std::abs(c.temp_i - c.temp_bath) <= 1e-12 * c.temp_bath) {
        rep.work_adiabatic = adiabatic_work(c);
        if (rep.work != 0.0 && *rep.work_adiabatic != 0.0)
            rep.efficiency = work_efficiency(rep.work, *rep.work_adiabatic, direction_of(c));
    }
    rep.purity_initial = l.purity[0];
    rep.purity_final = l.purity[last];
    rep.log_purity_ratio = std::log(rep.purity_final / rep.purity_initial);
    rep.speed_limit_bound = speed_limit_bound(p, bath);
    rep.t_eff_initial = l.t_eff[0];
    rep.t_eff_final = l.t_eff[last];

    for (std::size_t n = 0; n < r.trajectory.t.size(); ++n) {
        const double beta_ansatz = r.synthesis.beta[n * stride];
        rep.closed_loop_error = std::max(rep.closed_loop_error, std::abs(r.trajectory.params[n].beta - beta_ansatz));
    }
    const InertialConditionReport ic = inertial_condition(p);
    rep.inertial_ratio = ic.max_ratio;
    rep.inertial_violation = ic.violated;
    rep.min_sigma_dot = *std::min_element(l.sigma_dot.begin(), l.sigma_dot.end());
    rep.min_entropy_gap = l.s_e[0] - l.s_vn[0];
    for (std::size_t k = 0; k < l.size(); ++k) {
        rep.max_first_law_defect = std::max(rep.max_first_law_defect, l.first_law_defect(k));
        rep.min_entropy_gap = std::min(rep.min_entropy_gap, l.s_e[k] - l.s_vn[k]);
    }
    rep.multiple_root_points = r.synthesis.multiple_root_points;
    rep.max_step_error = r.trajectory.max_step_error;

    const PictureStates states = picture_states(p, r.trajectory, stride);
    r.spin.reserve(states.schrodinger.size());
    for (const Mat2& rho : states.schrodinger)
        r.spin.emplace_back((rho * spin::sx()).trace().real(), (rho * spin::sy()).trace().real(),
                            (rho * spin::sz()).trace().real());

    if (rc.verify) {
        const StateTrajectory oracle = superoperator_integrate(DensityMatrix(states.interaction[0]), p, bath, step);
        double worst = 0.0;
        for (std::size_t n = 0; n < oracle.rho.size(); ++n)
            worst = std::max(worst, trace_distance(oracle.rho[n].matrix(), states.interaction[n]));
        rep.oracle_trace_distance = worst;
        rep.oracle_min_eigenvalue = oracle.min_eigenvalue;
    }
    return r;
}

// Fidelity at tf between the inertial solution and exact time-ordered
// propagation of the isolated system, starting from `rho0`.
inline double isolated_inertial_fidelity(const ControlProtocol& p, const DensityMatrix& rho0, double step) {
    const std::vector<UnitaryPropagator> u = exact_propagate(p, step);
    const InertialPropagator prop(p);
    const Mat2 inertial = schrodinger_state(rho0.matrix(), prop.at_index(p.size() - 1), p.frame(0), p.frame(p.size() - 1));
    const Mat2 exact = to_schrodinger(rho0.matrix(), u.back().U);
    return fidelity(DensityMatrix(hermitian_part(inertial)), DensityMatrix(hermitian_part(exact)));
}

struct SweepRow {
    double tf{0.0};
    double accuracy_ste{0.0};
    double accuracy_quench{0.0};
    double work{0.0};
    std::optional<double> efficiency;
    double bound{0.0};
    double log_purity_ratio{0.0};
    std::string status{"ok"};
};

// Rows run concurrently; output order follows tf_list.
inline std::vector<SweepRow> sweep(const RunConfig& base, const std::vector<double>& tf_list) {
    std::vector<std::future<SweepRow>> jobs;
    jobs.reserve(tf_list.size());
    for (double tf : tf_list) {
        jobs.push_back(std::async(std::launch::async, [base, tf] {
            SweepRow row;
            row.tf = tf;
            try {
                RunConfig rc = base;
                rc.verify = false;
                rc.synthesis.tf = tf;
                const RunResult r = execute(rc);
                row.accuracy_ste = r.report.accuracy;
                row.accuracy_quench = r.report.accuracy_quench;
                row.work = r.report.work;
                row.efficiency = r.report.efficiency;
                row.bound = r.report.speed_limit_bound;
                row.log_purity_ratio = std::abs(r.report.log_purity_ratio);
            } catch (const std::exception& e) {
                row.status = e.what();
            }
            return row;
        }));
    }
    std::vector<SweepRow> rows;
    rows.reserve(jobs.size());
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

// ---- serialization ---------------------------------------------------------

inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline const char* kTimeSeriesHeader =
    "t,omega,epsilon,rabi,mu,alpha,beta,purity,S_vn,S_e,power,work,heat,sigma_dot,T_eff";

inline std::string timeseries_csv(const RunResult& r) {
    std::ostringstream out;
    out << kTimeSeriesHeader << '\n';
    const ControlProtocol& p = r.synthesis.protocol;
    const std::size_t stride = p.stride_for(r.config.step());
    const ThermoLedger& l = r.ledger;
    for (std::size_t k = 0; k < l.size(); ++k) {
        const ProtocolSample& s = p[k * stride];
        const double cols[] = {l.t[k],        s.omega,    s.epsilon,  s.rabi,     s.mu,
                               s.alpha,       r.trajectory.params[k].beta,         l.purity[k],
                               l.s_vn[k],     l.s_e[k],   l.power[k], l.work[k],  l.heat[k],
                               l.sigma_dot[k], l.t_eff[k]};
        for (std::size_t j = 0; j < std::size(cols); ++j) out << (j ? "," : "") << fmt_double(cols[j]);
        out << '\n';
    }
    return out.str();
}

inline const char* kTrajectoryHeader = "t,Sx,Sy,Sz,bloch_norm,purity";

inline std::string trajectory_csv(const RunResult& r) {
    std::ostringstream out;
    out << kTrajectoryHeader << '\n';
    for (std::size_t k = 0; k < r.spin.size(); ++k) {
        const Eigen::Vector3d& s = r.spin[k];
        out << fmt_double(r.ledger.t[k]) << ',' << fmt_double(s(0)) << ',' << fmt_double(s(1)) << ','
            << fmt_double(s(2)) << ',' << fmt_double(2.0 * s.norm()) << ',' << fmt_double(r.ledger.purity[k]) << '\n';
    }
    return out.str();
}

inline const char* kSweepHeader = "tf,accuracy_ste,accuracy_quench,work,efficiency,bound,log_purity_ratio,status";

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << kSweepHeader << '\n';
    for (const SweepRow& r : rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        out << fmt_double(r.tf) << ',' << fmt_double(r.accuracy_ste) << ',' << fmt_double(r.accuracy_quench) << ','
            << fmt_double(r.work) << ',' << (r.efficiency ? fmt_double(*r.efficiency) : "nan") << ','
            << fmt_double(r.bound) << ',' << fmt_double(r.log_purity_ratio) << ',' << status << '\n';
    }
    return out.str();
}

inline json sweep_json(const std::vector<SweepRow>& rows) {
    json arr = json::array();
    for (const SweepRow& r : rows) {
        json row{{"tf", r.tf},
                 {"accuracy_ste", r.accuracy_ste},
                 {"accuracy_quench", r.accuracy_quench},
                 {"work", r.work},
                 {"bound", r.bound},
                 {"log_purity_ratio", r.log_purity_ratio},
                 {"status", r.status}};
        row["efficiency"] = r.efficiency ? json(*r.efficiency) : json(nullptr);
        arr.push_back(row);
    }
    return arr;
}

inline json config_json(const std::string& name, const SynthesisConfig& c) {
    return {{"preset", name},         {"rabi_i", c.rabi_i},       {"rabi_f", c.rabi_f},
            {"temp_i", c.temp_i},     {"temp_f", c.temp_f},       {"temp_bath", c.temp_bath},
            {"tf", c.tf},             {"phase_a", c.a()},         {"phase_b", c.b()},
            {"grid_points", c.points()}, {"dt", c.step()},        {"rate_prefactor", c.rate_prefactor}};
}

inline json report_json(const RunResult& r, const std::string& timeseries_file) {
    const RunReport& rep = r.report;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    return {{"config", config_json(r.name, r.config)},
            {"fidelity", rep.fidelity},
            {"accuracy", rep.accuracy},
            {"accuracy_quench", rep.accuracy_quench},
            {"work", rep.work},
            {"heat", rep.heat},
            {"energy_change", rep.energy_change},
            {"delta_s_universe", rep.delta_s_universe},
            {"work_adiabatic", opt(rep.work_adiabatic)},
            {"efficiency", opt(rep.efficiency)},
            {"speed_limit", {{"bound", rep.speed_limit_bound}, {"log_purity_ratio", std::abs(rep.log_purity_ratio)}}},
            {"purity", {{"initial", rep.purity_initial}, {"final", rep.purity_final}}},
            {"t_eff", {{"initial", rep.t_eff_initial}, {"final", rep.t_eff_final}}},
            {"diagnostics",
             {{"closed_loop_error", rep.closed_loop_error},
              {"inertial_ratio", rep.inertial_ratio},
              {"inertial_violation", rep.inertial_violation},
              {"max_first_law_defect", rep.max_first_law_defect},
              {"min_sigma_dot", rep.min_sigma_dot},
              {"min_entropy_gap", rep.min_entropy_gap},
              {"multiple_root_points", rep.multiple_root_points},
              {"max_step_error", rep.max_step_error},
              {"oracle_trace_distance", opt(rep.oracle_trace_distance)},
              {"oracle_min_eigenvalue", opt(rep.oracle_min_eigenvalue)}}},
            {"timeseries", timeseries_file}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidConfig("cannot write " + path.string());
    out << text;
}

}  // namespace ste
