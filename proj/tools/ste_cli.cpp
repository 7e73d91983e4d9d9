// ste_cli: command-line front end: run, sweep, trajectory, presets.
//
// Exit codes: 0 success, 1 unexpected error, 2 configuration error,
// 3 infeasible synthesis, 4 integration failure.

#include "ste/ste.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, infeasible = 3, integration_error = 4 };

struct Options {
    std::string preset;
    std::string config;
    std::string outdir;
    std::string format{"csv"};
    std::string tf_unit{"au"};
    double tf{0.0};
    std::vector<double> tf_list;
    double rate_prefactor{0.0};
    bool verify{false};
    bool table_orientation{false};
};

double unit_scale(const std::string& unit) { return unit == "period" ? ste::kReferencePeriod : 1.0; }

ste::RunConfig build_config(const Options& o) {
    ste::json doc = ste::json::object();
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw ste::InvalidConfig("cannot open config file " + o.config);
        try {
            in >> doc;
        } catch (const ste::json::exception& e) {
            throw ste::InvalidConfig(std::string("malformed config: ") + e.what());
        }
    }
    if (!o.preset.empty()) doc["preset"] = o.preset;
    if (o.table_orientation) doc["table_orientation"] = true;
    if (o.tf > 0.0) doc["tf"] = o.tf * unit_scale(o.tf_unit);
    if (o.rate_prefactor > 0.0) doc["rate_prefactor"] = o.rate_prefactor;
    if (o.verify) doc["verify"] = true;
    ste::RunConfig rc = ste::parse_config(doc);

    if (!o.outdir.empty()) {
        rc.outdir = o.outdir;
    } else if (!doc.contains("outdir")) {
        if (const char* env = std::getenv("STE_OUTDIR")) rc.outdir = env;
    }
    if (!o.tf_list.empty()) {
        rc.tf_list.clear();
        for (double tf : o.tf_list) rc.tf_list.push_back(tf * unit_scale(o.tf_unit));
    }
    return rc;
}

int cmd_run(const Options& o) {
    const ste::RunConfig rc = build_config(o);
    const ste::RunResult r = ste::execute(rc);
    const std::filesystem::path dir(rc.outdir);
    const std::string series = r.name + "_timeseries.csv";
    ste::write_text(dir / series, ste::timeseries_csv(r));
    const ste::json report = ste::report_json(r, series);
    ste::write_text(dir / (r.name + "_report.json"), report.dump(2) + "\n");
    if (r.report.inertial_violation)
        std::cerr << "warning: inertial condition violated (ratio " << r.report.inertial_ratio << ")\n";
    if (o.format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "preset,accuracy,accuracy_quench,work,efficiency,t_eff_final\n"
                  << r.name << ',' << ste::fmt_double(r.report.accuracy) << ','
                  << ste::fmt_double(r.report.accuracy_quench) << ',' << ste::fmt_double(r.report.work) << ','
                  << (r.report.efficiency ? ste::fmt_double(*r.report.efficiency) : "nan") << ','
                  << ste::fmt_double(r.report.t_eff_final) << "\n";
    }
    return ok;
}

int cmd_sweep(const Options& o) {
    ste::RunConfig rc = build_config(o);
    if (rc.tf_list.empty())
        for (double m : {2.0, 4.0, 6.0, 8.0, 10.0}) rc.tf_list.push_back(m * ste::kReferencePeriod);
    const std::vector<ste::SweepRow> rows = ste::sweep(rc, rc.tf_list);
    const std::filesystem::path dir(rc.outdir);
    if (o.format == "json") {
        const std::string text = ste::sweep_json(rows).dump(2) + "\n";
        ste::write_text(dir / (rc.name + "_sweep.json"), text);
        std::cout << text;
    } else {
        const std::string text = ste::sweep_csv(rows);
        ste::write_text(dir / (rc.name + "_sweep.csv"), text);
        std::cout << text;
    }
    return ok;
}

int cmd_trajectory(const Options& o) {
    const ste::RunConfig rc = build_config(o);
    const ste::RunResult r = ste::execute(rc);
    const std::string text = ste::trajectory_csv(r);
    ste::write_text(std::filesystem::path(rc.outdir) / (r.name + "_trajectory.csv"), text);
    std::cout << text;
    return ok;
}

int cmd_presets(const Options& o) {
    if (o.format == "json") {
        ste::json arr = ste::json::array();
        for (const ste::Preset& p : ste::presets()) {
            const ste::SynthesisConfig c = ste::preset_config(p.name, o.table_orientation);
            arr.push_back({{"name", p.name}, {"label", p.label}, {"rabi_i", c.rabi_i}, {"rabi_f", c.rabi_f},
                           {"temp_i", c.temp_i}, {"temp_f", c.temp_f}});
        }
        std::cout << arr.dump(2) << "\n";
        return ok;
    }
    std::cout << "name,label,rabi_i,rabi_f,temp_i,temp_f\n";
    for (const ste::Preset& p : ste::presets()) {
        const ste::SynthesisConfig c = ste::preset_config(p.name, o.table_orientation);
        std::cout << p.name << ',' << p.label << ',' << ste::fmt_double(c.rabi_i) << ',' << ste::fmt_double(c.rabi_f)
                  << ',' << ste::fmt_double(c.temp_i) << ',' << ste::fmt_double(c.temp_f) << "\n";
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shortcut-to-equilibrium protocols for a driven qubit"};
    app.require_subcommand(1);
    Options o;

    auto common = [&o](CLI::App* sub) {
        sub->add_option("--preset", o.preset, "preset name (pe, pc, pe1, pe2, pec)");
        sub->add_option("--config", o.config, "JSON config file");
        sub->add_option("--outdir", o.outdir, "output directory (default: $STE_OUTDIR or .)");
        sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--tf-unit", o.tf_unit, "unit of --tf/--tf-list: au or period (2 pi / 5)")
            ->check(CLI::IsMember({"au", "period"}));
        sub->add_option("--rate-prefactor", o.rate_prefactor, "bath rate prefactor G");
        sub->add_flag("--table-orientation", o.table_orientation, "expansion listed as 5 -> 12");
    };

    CLI::App* run = app.add_subcommand("run", "synthesize, integrate and write the ledger");
    common(run);
    run->add_option("--tf", o.tf, "protocol duration");
    run->add_flag("--verify", o.verify, "cross-check against the Liouville-space oracle");

    CLI::App* sw = app.add_subcommand("sweep", "accuracy, work and speed limit over durations");
    common(sw);
    sw->add_option("--tf-list", o.tf_list, "durations")->delimiter(',');

    CLI::App* tr = app.add_subcommand("trajectory", "spin expectations in the Schrodinger picture");
    common(tr);
    tr->add_option("--tf", o.tf, "protocol duration");

    CLI::App* pr = app.add_subcommand("presets", "list preset protocols");
    pr->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    pr->add_flag("--table-orientation", o.table_orientation, "expansion listed as 5 -> 12");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (run->parsed()) return cmd_run(o);
        if (sw->parsed()) return cmd_sweep(o);
        if (tr->parsed()) return cmd_trajectory(o);
        if (pr->parsed()) return cmd_presets(o);
    } catch (const ste::InvalidConfig& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const ste::NoRoot& e) {
        std::cerr << "infeasible protocol: " << e.what() << "\n";
        return infeasible;
    } catch (const ste::NonPositiveAnsatz& e) {
        std::cerr << "infeasible protocol: " << e.what() << "\n";
        return infeasible;
    } catch (const ste::PositivityLoss& e) {
        std::cerr << "integration failure: " << e.what() << "\n";
        return integration_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
    return failure;
}
