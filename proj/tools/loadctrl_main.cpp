// Command-line front end: closed-loop simulation, offline convergence runs,
// paired algorithm comparisons, and the centralized reference solution.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loadctrl/errors.hpp"
#include "loadctrl/harness.hpp"

namespace fs = std::filesystem;
using namespace loadctrl;

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> algo;
    std::optional<std::string> noise;
    std::optional<int> comm_n0;
    std::optional<std::string> out_dir;
    std::optional<double> tol;
    std::optional<int> n;
    std::optional<double> c_mw;
    std::optional<double> rho;
    std::optional<std::string> variant;
    std::optional<double> horizon;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "Scenario config file (JSON)");
    cmd->add_option("--seed", o.seed, "Override RNG seed");
    cmd->add_option("--algo", o.algo, "Algorithm: dmadmm|pjadmm|dual|none");
    cmd->add_option("--noise", o.noise, "Noise: on|off");
    cmd->add_option("--comm", o.comm_n0,
                    "Neighborhood half-width n0 (enables 1D-grid communication)");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--tol", o.tol, "Residual tolerance (MW)");
    cmd->add_option("--n", o.n, "Number of loads");
    cmd->add_option("--c", o.c_mw, "Balance constant for offline/oracle runs (MW)");
    cmd->add_option("--rho", o.rho, "Penalty parameter");
    cmd->add_option("--variant", o.variant,
                    "Disutility: quadratic|kinked|asymmetric|mixed");
    cmd->add_option("--horizon", o.horizon, "Simulation horizon (s)");
    cmd->add_option("--threads", o.threads, "Agent-update worker threads");
}

ScenarioConfig make_config(const CommonOpts& o) {
    ScenarioConfig cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.algo) cfg.algo = algo_from_string(*o.algo);
    if (o.noise) {
        if (*o.noise == "on") cfg.noise = true;
        else if (*o.noise == "off") cfg.noise = false;
        else throw ConfigError("--noise expects on|off");
    }
    if (o.comm_n0) {
        cfg.comm_mode = *o.comm_n0 > 0 ? CommMode::kGrid1d : CommMode::kNone;
        cfg.comm_n0 = *o.comm_n0;
    }
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.tol) cfg.tol_r_mw = *o.tol;
    if (o.n) cfg.n = *o.n;
    if (o.c_mw) cfg.offline_c_mw = *o.c_mw;
    if (o.rho) cfg.rho = *o.rho;
    if (o.variant) cfg.variant = variant_from_string(*o.variant);
    if (o.horizon) cfg.horizon_s = *o.horizon;
    if (o.threads) cfg.threads = *o.threads;
    cfg.validate();
    return cfg;
}

fs::path ensure_out_dir(const ScenarioConfig& cfg) {
    fs::path dir = cfg.out_dir.empty() ? fs::path("out") : fs::path(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

void print_metrics(const std::string& label, const Metrics& m) {
    std::printf("%-8s max|dw| %9.5f Hz   p_end %12.6f\n", label.c_str(),
                m.max_abs_domega_hz, m.p_end);
    for (const WindowMetrics& w : m.windows) {
        std::printf("  window [%5.1f,%6.1f) s  C=%5.1f MW  max|dw| %9.5f  "
                    "steady|dw| %10.6f  dip %9.5f  overshoot %8.5f\n",
                    w.t_begin_s, w.t_end_s, w.c_mw, w.max_abs_domega_hz,
                    w.steady_abs_domega_hz, w.min_domega_hz, w.overshoot_hz);
    }
}

int cmd_simulate(const CommonOpts& o) {
    const ScenarioConfig cfg = make_config(o);
    const Trace trace = run_closed_loop(cfg);
    const Metrics m = compute_metrics(trace);
    const fs::path dir = ensure_out_dir(cfg);
    save_trace_csv(trace, (dir / "trace.csv").string());
    std::ofstream mj(dir / "metrics.json");
    mj << metrics_to_json(m).dump(2) << "\n";
    std::printf("wrote %s and %s\n", (dir / "trace.csv").c_str(),
                (dir / "metrics.json").c_str());
    print_metrics(to_string(cfg.algo), m);
    return 0;
}

int cmd_converge(const CommonOpts& o) {
    const ScenarioConfig cfg = make_config(o);
    const ConvergenceReport report = run_offline(cfg);
    std::cout << report_to_json(report).dump(2) << "\n";
    if (!report.rho_within_bound)
        std::printf("note: rho %.3g exceeds the guaranteed bound %.3g; "
                    "convergence is not asserted\n",
                    report.rho_used, report.rho_max);
    return report.converged || !report.rho_within_bound ? 0 : 1;
}

int cmd_compare(const CommonOpts& o, const std::vector<std::string>& algos) {
    const ScenarioConfig base = make_config(o);
    const fs::path dir = ensure_out_dir(base);
    for (const std::string& name : algos) {
        ScenarioConfig cfg = base;
        cfg.algo = algo_from_string(name);
        try {
            const Trace trace = run_closed_loop(cfg);
            const Metrics m = compute_metrics(trace);
            save_trace_csv(trace, (dir / ("trace_" + name + ".csv")).string());
            print_metrics(name, m);
        } catch (const UnsupportedDisutility& e) {
            std::printf("%-8s not applicable: %s\n", name.c_str(), e.what());
        }
    }
    return 0;
}

int cmd_oracle(const CommonOpts& o) {
    const ScenarioConfig cfg = make_config(o);
    const BuiltInstance built = build_instance(cfg);
    const double tol = o.tol ? *o.tol : 1e-9;
    const OracleSolution sol = solve(built.instance_for(cfg.offline_c_mw), tol);
    nlohmann::json j;
    j["y_star"] = sol.y_star;
    j["p_star"] = sol.p_star;
    j["x_star_mw"] = sol.x_star_mw;
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Demand-side primary frequency control simulator"};
    app.require_subcommand(1);

    CommonOpts o;
    std::vector<std::string> algos{"dmadmm", "pjadmm", "none"};

    CLI::App* sim = app.add_subcommand("simulate", "Run the closed-loop simulation");
    add_common(sim, o);
    CLI::App* conv = app.add_subcommand(
        "converge", "Offline convergence run with diagnostics (exact residual)");
    add_common(conv, o);
    CLI::App* cmp = app.add_subcommand("compare", "Paired runs across algorithms");
    add_common(cmp, o);
    cmp->add_option("--algos", algos, "Algorithms to compare")->delimiter(',');
    CLI::App* orc = app.add_subcommand("oracle", "Print the centralized solution");
    add_common(orc, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(o);
        if (conv->parsed()) return cmd_converge(o);
        if (cmp->parsed()) return cmd_compare(o, algos);
        if (orc->parsed()) return cmd_oracle(o);
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
