// cli.hpp — command-line front end.
//
// Subcommands: stability, entangle, modes, sweep, threshold. Reports are JSON
// on stdout; sweeps write CSV (to --output or stdout). Exit codes: 0 success,
// 1 malformed input (bad flags, config, file), 2 physics/numerics refusal
// (no steady state, failed residual, bad threshold bracket).

#pragma once

#include "omsim/config.hpp"
#include "omsim/entanglement.hpp"
#include "omsim/model.hpp"
#include "omsim/modes.hpp"
#include "omsim/solver.hpp"
#include "omsim/sweep.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

namespace omsim::cli {

namespace detail {

inline int cmd_stability(const std::string& config_path, std::ostream& out) {
    const SystemConfig cfg = parse_system_config(load_json_file(config_path));
    const StabilityReport report = assess_stability(build_drift_network(cfg.params));
    out << to_json(report).dump(2) << "\n";
    return report.stable ? 0 : 2;
}

inline int cmd_entangle(const std::string& config_path, std::ostream& out) {
    const SystemConfig cfg = parse_system_config(load_json_file(config_path));
    const EntanglementReport report = steady_state_entanglement(cfg.params);
    out << to_json(report).dump(2) << "\n";
    return 0;
}

inline int cmd_modes(const std::string& config_path, double tol, std::ostream& out) {
    const SystemConfig cfg = parse_system_config(load_json_file(config_path));
    const ModeDecomposition dec = cfg.params.modes() == 2
                                      ? tilde_modes(two_mode_view(cfg.params))
                                      : hybrid_modes(cfg.params);
    const bool dark = dark_mode_present(cfg.params, tol);
    out << to_json(dec, dark).dump(2) << "\n";
    return 0;
}

inline int cmd_sweep(const std::string& spec_path, const std::string& output_path,
                     int threads, std::ostream& out) {
    const SweepSpec spec = parse_sweep_spec(load_json_file(spec_path));
    const SweepResult result = run_sweep(spec, threads);
    if (output_path.empty()) {
        write_csv(result, out);
    } else {
        std::ofstream f(output_path);
        if (!f) throw ConfigError("cannot write output file '" + output_path + "'");
        write_csv(result, f);
    }
    return 0;
}

inline int cmd_threshold(const std::string& config_path, const std::string& param,
                         double lo, double hi, const std::string& target, double rel_tol,
                         std::ostream& out) {
    const SystemConfig cfg = parse_system_config(load_json_file(config_path));
    const ThresholdResult result =
        find_threshold(cfg.params, param, lo, hi, target, rel_tol);
    out << to_json(result, param, target).dump(2) << "\n";
    return 0;
}

}  // namespace detail

// Parse and execute. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"steady-state entanglement of a loop-coupled optomechanical network"};
    app.set_version_flag("--version", "omsim 1.0.0");
    app.require_subcommand(1);

    std::string config_path, spec_path, output_path, param, target = "E_N_1";
    int threads = 0;
    double tol = 0.0, lo = 0.0, hi = 0.0, rel_tol = 1e-3;

    CLI::App* stability = app.add_subcommand(
        "stability", "classify the drift matrix and report its spectrum");
    stability->add_option("--config", config_path, "system config JSON")->required();

    CLI::App* entangle = app.add_subcommand(
        "entangle", "steady-state entanglement measures for one parameter set");
    entangle->add_option("--config", config_path, "system config JSON")->required();

    CLI::App* modes = app.add_subcommand(
        "modes", "hybrid mechanical modes, effective couplings, dark-mode verdict");
    modes->add_option("--config", config_path, "system config JSON")->required();
    modes->add_option("--tol", tol, "dark-mode coupling tolerance (0 = 1e-6 * max G)");

    CLI::App* sweep = app.add_subcommand("sweep", "evaluate outputs over a 1-D/2-D grid");
    sweep->add_option("--spec", spec_path, "sweep spec JSON")->required();
    sweep->add_option("--output", output_path, "CSV destination (default: stdout)");
    sweep->add_option("--threads", threads,
                      "worker threads (0 = OMSIM_THREADS or hardware)");

    CLI::App* threshold = app.add_subcommand(
        "threshold", "locate where an entanglement output first reaches zero");
    threshold->add_option("--config", config_path, "system config JSON")->required();
    threshold->add_option("--param", param, "parameter to vary")->required();
    threshold->add_option("--lo", lo, "bracket lower edge")->required();
    threshold->add_option("--hi", hi, "bracket upper edge")->required();
    threshold->add_option("--target", target, "output to track (default E_N_1)");
    threshold->add_option("--tol", rel_tol, "relative tolerance on the threshold");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (stability->parsed()) return detail::cmd_stability(config_path, out);
        if (entangle->parsed()) return detail::cmd_entangle(config_path, out);
        if (modes->parsed()) return detail::cmd_modes(config_path, tol, out);
        if (sweep->parsed()) return detail::cmd_sweep(spec_path, output_path, threads, out);
        if (threshold->parsed())
            return detail::cmd_threshold(config_path, param, lo, hi, target, rel_tol, out);
        err << "error: no subcommand given\n";
        return 1;
    } catch (const UnstableError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return run(args, out, err);
}

}  // namespace omsim::cli
