#include "evplatoon/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "evplatoon/energy.hpp"
#include "evplatoon/format.hpp"
#include "evplatoon/scenario_file.hpp"
#include "evplatoon/sim.hpp"
#include "evplatoon/svg.hpp"
#include "evplatoon/verify.hpp"

#ifdef _WIN32
#define EVP_ISATTY(fd) 0
#else
#include <unistd.h>
#define EVP_ISATTY(fd) isatty(fd)
#endif

namespace evp {

namespace {

namespace fs = std::filesystem;

bool color_enabled(const std::ostream& out) {
    if (std::getenv("EVPLATOON_NO_COLOR") != nullptr) return false;
    return &out == &std::cout && EVP_ISATTY(1);
}

std::string styled(const std::string& text, const char* code, bool enabled) {
    if (!enabled) return text;
    return std::string("\033[") + code + "m" + text + "\033[0m";
}

struct CommonOptions {
    std::string out_dir = "out";
    unsigned jobs = 1;
    double dt = 0.0;  // 0 keeps the scenario's own step
    std::string dump_path;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_dt_and_dump = true) {
    cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--jobs", opts.jobs, "parallel runs for sweeps/comparisons")
        ->capture_default_str();
    if (with_dt_and_dump) {
        cmd->add_option("--dt", opts.dt, "override the integration step");
        cmd->add_option("--dump-scenario", opts.dump_path,
                        "write the resolved scenario to this path");
    }
}

Scenario load_and_prepare(const std::string& name_or_path, const CommonOptions& opts) {
    Scenario sc = load_scenario(name_or_path);
    if (opts.dt > 0.0) sc.dt = opts.dt;
    validate_scenario(sc);
    if (!opts.dump_path.empty()) {
        std::ofstream dump(opts.dump_path);
        if (!dump) throw std::runtime_error("cannot write scenario dump '" + opts.dump_path + "'");
        dump_scenario(dump, sc);
    }
    return sc;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

// Spacing/relative-velocity series of follower i against its predecessor.
void relative_series(const Trajectory& traj, std::size_t i, std::vector<double>& z,
                     std::vector<double>& y) {
    const auto& ahead = traj.vehicles[i - 1];
    const auto& ego = traj.vehicles[i];
    z.resize(traj.time.size());
    y.resize(traj.time.size());
    for (std::size_t k = 0; k < traj.time.size(); ++k) {
        z[k] = ahead.position[k] - ego.position[k];
        y[k] = ahead.velocity[k] - ego.velocity[k];
    }
}

void write_plots(const fs::path& dir, const Trajectory& traj) {
    const std::size_t n_follow = traj.vehicles.size() - 1;
    double z_eq = std::numeric_limits<double>::quiet_NaN();
    try {
        z_eq = optimal_velocity_inverse(traj.vehicles[0].velocity.back());
    } catch (const std::domain_error&) {
        // terminal lead speed outside the range of V; skip equilibrium marks
    }

    SvgPlot phase;
    phase.title = "Phase portrait";
    phase.x_label = "spacing";
    phase.y_label = "relative velocity";
    SvgPlot spacing;
    spacing.title = "Spacing";
    spacing.x_label = "t";
    spacing.y_label = "spacing";
    SvgPlot relvel;
    relvel.title = "Relative velocity";
    relvel.x_label = "t";
    relvel.y_label = "relative velocity";

    std::vector<double> z, y;
    for (std::size_t i = 1; i <= n_follow; ++i) {
        relative_series(traj, i, z, y);
        const std::string label = "vehicle " + std::to_string(i);
        const std::string color = series_color(i - 1);
        phase.series.push_back({label, z, y, color});
        phase.markers.push_back({z.front(), y.front(), SvgMarker::Glyph::dot, "#d62728", 4.0});
        spacing.series.push_back({label, traj.time, z, color});
        relvel.series.push_back({label, traj.time, y, color});
    }
    if (std::isfinite(z_eq)) {
        phase.markers.push_back({z_eq, 0.0, SvgMarker::Glyph::cross, "#ff00ff", 6.0});
        spacing.series.push_back({"equilibrium",
                                  {traj.time.front(), traj.time.back()},
                                  {z_eq, z_eq},
                                  "#888888",
                                  true});
    }
    relvel.series.push_back({"equilibrium",
                             {traj.time.front(), traj.time.back()},
                             {0.0, 0.0},
                             "#888888",
                             true});

    { auto f = open_output(dir / "phase.svg"); write_svg_plot(f, phase); }
    { auto f = open_output(dir / "spacing.svg"); write_svg_plot(f, spacing); }
    { auto f = open_output(dir / "relative_velocity.svg"); write_svg_plot(f, relvel); }
}

int cmd_run(const std::string& scenario_arg, const CommonOptions& opts, ModelKind model,
            bool plot, std::ostream& out, std::ostream& err) {
    Scenario sc;
    try {
        sc = load_and_prepare(scenario_arg, opts);
        sc.follower_models.assign(sc.initial.followers.size(), model);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        const Trajectory traj = integrate_platoon(sc);
        fs::create_directories(opts.out_dir);
        const fs::path dir{opts.out_dir};
        { auto f = open_output(dir / "trajectory.csv"); write_trajectory_csv(f, traj); }
        { auto f = open_output(dir / "events.log"); write_events_log(f, traj); }
        if (plot) write_plots(dir, traj);

        out << "model: " << model_label(model) << "\n";
        out << "samples: " << traj.time.size() << "  vehicles: " << traj.vehicles.size() << "\n";
        out << "events: " << traj.events.size() << "\n";
        for (const auto& e : traj.events) {
            out << "  t=" << num9(e.time) << " vehicle=" << e.vehicle << " "
                << event_name(e.type) << " value=" << num9(e.value) << "\n";
        }
        out << "wrote " << (dir / "trajectory.csv").string() << ", "
            << (dir / "events.log").string();
        if (plot) out << ", phase.svg, spacing.svg, relative_velocity.svg";
        out << "\n";
        out << "note: velocities are reported, not clamped; bound violations land in the "
               "event log\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitSimulationError;
    }
}

int cmd_compare(const std::string& scenario_arg, const CommonOptions& opts, std::ostream& out,
                std::ostream& err) {
    Scenario sc;
    try {
        sc = load_and_prepare(scenario_arg, opts);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        // baseline first: percent change is measured against ovfl
        const ModelComparison cmp =
            compare_models(sc, {ModelKind::ovfl, ModelKind::proposed}, opts.jobs);
        fs::create_directories(opts.out_dir);
        const fs::path csv_path = fs::path{opts.out_dir} / "comparison.csv";
        { auto f = open_output(csv_path); write_comparison_csv(f, cmp); }

        out << "energy consumption per unit mass (eta = " << num9(sc.eta) << ")\n";
        out << "vehicle      proposed          ovfl        change\n";
        for (std::size_t i = 0; i < cmp.vehicles.size(); ++i) {
            char line[128];
            std::snprintf(line, sizeof(line), "n=%-6d %12.6g  %12.6g  %+11.2f%%\n",
                          cmp.vehicles[i], cmp.omega[1][i], cmp.omega[0][i],
                          cmp.pct_change[1][i]);
            out << line;
        }
        out << "wrote " << csv_path.string() << "\n";
        if (scenario_arg == "table1") {
            out << "note: table1 adopts the two-vehicle benchmark coefficients (alpha=2, beta=3, "
                   "kappa=0.03); the platoon experiment never restates them\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitSimulationError;
    }
}

int cmd_sweep(const std::string& scenario_arg, const CommonOptions& opts,
              const std::vector<double>& kappas, std::ostream& out, std::ostream& err) {
    Scenario sc;
    try {
        if (kappas.empty()) throw std::runtime_error("sweep needs at least one kappa value");
        sc = load_and_prepare(scenario_arg, opts);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        SweepOptions sweep_opts;
        sweep_opts.jobs = opts.jobs;
        const auto rows = sweep_kappa(sc, kappas, sweep_opts);
        fs::create_directories(opts.out_dir);
        const fs::path csv_path = fs::path{opts.out_dir} / "sweep.csv";
        { auto f = open_output(csv_path); write_sweep_csv(f, rows); }

        out << "kappa      vehicle   omega        convergence_time  stall\n";
        for (const auto& row : rows) {
            char line[160];
            std::snprintf(line, sizeof(line), "%-10.4g %-9d %-12.6g %-17.6g %s\n", row.kappa,
                          row.vehicle, row.omega, row.convergence_time,
                          row.stall ? "true" : "false");
            out << line;
            if (!row.error.empty()) {
                err << "warning: kappa=" << num9(row.kappa) << ": " << row.error << "\n";
            }
        }
        out << "wrote " << csv_path.string() << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitSimulationError;
    }
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
    const bool color = color_enabled(out);
    auto pass = [&](bool ok) {
        return ok ? styled("PASS", "32", color) : styled("FAIL", "31", color);
    };

    try {
        const VerifyReport report = run_property_suite(options);

        out << pass(report.prop1_ok) << " zero-current optimality ("
            << report.prop1.ranking.size() << " feasible profiles, "
            << report.prop1.infeasible.size() << " discarded; zero profile "
            << (report.prop1.zero_profile_unique ? "uniquely minimal" : "not uniquely minimal")
            << ")\n";

        int ordering_ok = 0;
        for (const auto& c : report.theorem1) ordering_ok += c.ok ? 1 : 0;
        out << pass(report.theorem1_ok) << " energy ordering (" << ordering_ok << "/"
            << report.theorem1.size()
            << " scenarios with omega_proposed <= omega_ovfl + 1e-9, seed=" << options.seed
            << ")\n";
        if (!report.theorem1_ok) {
            for (const auto& c : report.theorem1) {
                if (c.ok) continue;
                err << "counterexample: trial " << c.trial << ", switched vehicle "
                    << c.switched_vehicle;
                if (!c.error.empty()) err << " (" << c.error << ")";
                err << "\n";
                err << "  omega_proposed=" << num9(c.omega_proposed)
                    << " omega_ovfl=" << num9(c.omega_ovfl)
                    << " excess=" << num9(c.omega_proposed - c.omega_ovfl) << "\n";
                const TheoremCase tc =
                    random_theorem_case(options.seed, c.trial, options.horizon, options.dt);
                dump_scenario(err, tc.scenario);
                break;
            }
        }

        out << pass(report.jacobian_ok) << " jacobian consistency (max rel err "
            << num_g(report.jacobian_max_rel_err, 3) << ", kappa-free at equilibrium)\n";

        return report.ok() ? kExitOk : kExitPropertyFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitPropertyFailure;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"evplatoon - energy-aware car-following platoon simulator"};
    app.require_subcommand(1);

    CommonOptions run_opts, compare_opts, sweep_opts;
    std::string run_scenario, compare_scenario, sweep_scenario;
    std::string model_name = "proposed";
    bool plot = false;
    std::vector<double> kappas;
    VerifyOptions verify_options;

    auto* run = app.add_subcommand("run", "integrate a scenario and write trajectory outputs");
    run->add_option("scenario", run_scenario, "builtin name (fig1a, fig1b, table1) or file path")
        ->required();
    run->add_option("--model", model_name, "follower model: proposed or ovfl")
        ->check(CLI::IsMember({"proposed", "ovfl"}))
        ->capture_default_str();
    run->add_flag("--plot", plot, "write SVG phase portrait and time-series plots");
    add_common(run, run_opts);

    auto* compare = app.add_subcommand("compare", "run proposed and ovfl, tabulate energy use");
    compare->add_option("scenario", compare_scenario, "builtin name or file path")->required();
    add_common(compare, compare_opts);

    auto* sweep = app.add_subcommand("sweep", "run the proposed model across kappa values");
    sweep->add_option("scenario", sweep_scenario, "builtin name or file path")->required();
    sweep->add_option("--kappa", kappas, "comma-separated kappa values")
        ->required()
        ->delimiter(',');
    add_common(sweep, sweep_opts);

    auto* verify = app.add_subcommand("verify", "run the property suite");
    verify->add_option("--seed", verify_options.seed, "seed for the scenario family")
        ->capture_default_str();
    verify->add_option("--trials", verify_options.trials, "number of random scenarios")
        ->capture_default_str();
    verify->add_option("--jobs", verify_options.jobs, "parallel trials")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    if (run->parsed()) {
        const ModelKind model = model_name == "ovfl" ? ModelKind::ovfl : ModelKind::proposed;
        return cmd_run(run_scenario, run_opts, model, plot, out, err);
    }
    if (compare->parsed()) return cmd_compare(compare_scenario, compare_opts, out, err);
    if (sweep->parsed()) return cmd_sweep(sweep_scenario, sweep_opts, kappas, out, err);
    if (verify->parsed()) return cmd_verify(verify_options, out, err);
    return kExitInputError;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace evp
