#include "loadctrl/config.hpp"

#include <fstream>

#include "loadctrl/errors.hpp"

namespace loadctrl {

std::string to_string(AlgoKind a) {
    switch (a) {
        case AlgoKind::kDmAdmm: return "dmadmm";
        case AlgoKind::kPjAdmm: return "pjadmm";
        case AlgoKind::kDualAscent: return "dual";
        case AlgoKind::kNone: return "none";
    }
    return "none";
}

AlgoKind algo_from_string(const std::string& s) {
    if (s == "dmadmm") return AlgoKind::kDmAdmm;
    if (s == "pjadmm") return AlgoKind::kPjAdmm;
    if (s == "dual") return AlgoKind::kDualAscent;
    if (s == "none") return AlgoKind::kNone;
    throw ConfigError("unknown algorithm: " + s);
}

std::string to_string(DisutilityVariant v) {
    switch (v) {
        case DisutilityVariant::kQuadratic: return "quadratic";
        case DisutilityVariant::kKinked: return "kinked";
        case DisutilityVariant::kAsymmetric: return "asymmetric";
        case DisutilityVariant::kMixed: return "mixed";
    }
    return "quadratic";
}

DisutilityVariant variant_from_string(const std::string& s) {
    if (s == "quadratic") return DisutilityVariant::kQuadratic;
    if (s == "kinked") return DisutilityVariant::kKinked;
    if (s == "asymmetric") return DisutilityVariant::kAsymmetric;
    if (s == "mixed") return DisutilityVariant::kMixed;
    throw ConfigError("unknown disutility variant: " + s);
}

std::string to_string(CommMode m) {
    return m == CommMode::kGrid1d ? "grid1d" : "none";
}

CommMode comm_mode_from_string(const std::string& s) {
    if (s == "none") return CommMode::kNone;
    if (s == "grid1d") return CommMode::kGrid1d;
    throw ConfigError("unknown comm mode: " + s);
}

void ScenarioConfig::validate() const {
    if (n < 1) throw ConfigError("config: n must be >= 1");
    if (!(total_b_mw > 0.0)) throw ConfigError("config: total_b_mw must be > 0");
    if (!(rho > 0.0)) throw ConfigError("config: rho must be > 0");
    if (pj_tau < 0.0) throw ConfigError("config: pj_tau must be >= 0 (0 = auto)");
    if (!(pj_gamma > 0.0 && pj_gamma < 2.0))
        throw ConfigError("config: pj_gamma must be in (0, 2)");
    if (dual_gamma < 0.0) throw ConfigError("config: dual_gamma must be >= 0 (0 = auto)");
    if (!(smoothing >= 0.0 && smoothing < 1.0))
        throw ConfigError("config: smoothing must be in [0, 1)");
    if (comm_n0 < 0) throw ConfigError("config: comm_n0 must be >= 0");
    if (!(horizon_s > 0.0)) throw ConfigError("config: horizon_s must be > 0");
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
    if (offline_max_iters < 1) throw ConfigError("config: offline_max_iters must be >= 1");
    if (!(tol_r_mw > 0.0 && tol_x_mw > 0.0 && tol_p > 0.0))
        throw ConfigError("config: tolerances must be > 0");
    grid.validate();
    schedule.validate();
}

nlohmann::json config_to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["n"] = cfg.n;
    j["seed"] = cfg.seed;
    j["disutility"] = {{"variant", to_string(cfg.variant)},
                       {"raw_kink_offset", cfg.raw_kink_offset}};
    j["bounds"] = {{"total_b_mw", cfg.total_b_mw}};
    j["algo"] = to_string(cfg.algo);
    j["dmadmm"] = {{"rho", cfg.rho}, {"cap_rho_at_bound", cfg.cap_rho_at_bound}};
    j["pjadmm"] = {{"tau", cfg.pj_tau}, {"gamma", cfg.pj_gamma}};
    j["dual"] = {{"gamma", cfg.dual_gamma}};
    j["grid"] = {{"t_step_s", cfg.grid.t_step_s},
                 {"inertia_mw_s2", cfg.grid.inertia_mw_s2},
                 {"damping_mw_s", cfg.grid.damping_mw_s},
                 {"droop_hz_per_mw", cfg.grid.droop_hz_per_mw},
                 {"governor_tc_s", cfg.grid.governor_tc_s},
                 {"omega0_hz", cfg.grid.omega0_hz},
                 {"sigma_zeta_mw", cfg.grid.sigma_zeta_mw},
                 {"sigma_delta_hz", cfg.grid.sigma_delta_hz},
                 {"exact_discretization", cfg.grid.exact_discretization}};
    nlohmann::json sched = nlohmann::json::array();
    for (const auto& [t, g] : cfg.schedule.breakpoints) sched.push_back({t, g});
    j["schedule"] = sched;
    j["noise"] = cfg.noise;
    j["estimator"] = {{"smoothing", cfg.smoothing}};
    j["comm"] = {{"mode", to_string(cfg.comm_mode)}, {"n0", cfg.comm_n0}};
    j["horizon_s"] = cfg.horizon_s;
    j["threads"] = cfg.threads;
    j["output"] = {{"dir", cfg.out_dir},
                   {"record_agent_x", cfg.record_agent_x},
                   {"record_estimates", cfg.record_estimates}};
    j["offline"] = {{"c_mw", cfg.offline_c_mw},
                    {"max_iters", cfg.offline_max_iters},
                    {"tol_r_mw", cfg.tol_r_mw},
                    {"tol_x_mw", cfg.tol_x_mw},
                    {"tol_p", cfg.tol_p}};
    return j;
}

namespace {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ScenarioConfig config_from_json(const nlohmann::json& j) {
    ScenarioConfig cfg;
    read_if(j, "n", cfg.n);
    read_if(j, "seed", cfg.seed);
    if (j.contains("disutility")) {
        const auto& d = j.at("disutility");
        if (d.contains("variant"))
            cfg.variant = variant_from_string(d.at("variant").get<std::string>());
        read_if(d, "raw_kink_offset", cfg.raw_kink_offset);
    }
    if (j.contains("bounds")) read_if(j.at("bounds"), "total_b_mw", cfg.total_b_mw);
    if (j.contains("algo")) cfg.algo = algo_from_string(j.at("algo").get<std::string>());
    if (j.contains("dmadmm")) {
        read_if(j.at("dmadmm"), "rho", cfg.rho);
        read_if(j.at("dmadmm"), "cap_rho_at_bound", cfg.cap_rho_at_bound);
    }
    if (j.contains("pjadmm")) {
        read_if(j.at("pjadmm"), "tau", cfg.pj_tau);
        read_if(j.at("pjadmm"), "gamma", cfg.pj_gamma);
    }
    if (j.contains("dual")) read_if(j.at("dual"), "gamma", cfg.dual_gamma);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        read_if(g, "t_step_s", cfg.grid.t_step_s);
        read_if(g, "inertia_mw_s2", cfg.grid.inertia_mw_s2);
        read_if(g, "damping_mw_s", cfg.grid.damping_mw_s);
        read_if(g, "droop_hz_per_mw", cfg.grid.droop_hz_per_mw);
        read_if(g, "governor_tc_s", cfg.grid.governor_tc_s);
        read_if(g, "omega0_hz", cfg.grid.omega0_hz);
        read_if(g, "sigma_zeta_mw", cfg.grid.sigma_zeta_mw);
        read_if(g, "sigma_delta_hz", cfg.grid.sigma_delta_hz);
        read_if(g, "exact_discretization", cfg.grid.exact_discretization);
    }
    if (j.contains("schedule")) {
        cfg.schedule.breakpoints.clear();
        for (const auto& row : j.at("schedule"))
            cfg.schedule.breakpoints.emplace_back(row.at(0).get<double>(),
                                                  row.at(1).get<double>());
    }
    read_if(j, "noise", cfg.noise);
    if (j.contains("estimator")) read_if(j.at("estimator"), "smoothing", cfg.smoothing);
    if (j.contains("comm")) {
        const auto& c = j.at("comm");
        if (c.contains("mode"))
            cfg.comm_mode = comm_mode_from_string(c.at("mode").get<std::string>());
        read_if(c, "n0", cfg.comm_n0);
    }
    read_if(j, "horizon_s", cfg.horizon_s);
    read_if(j, "threads", cfg.threads);
    if (j.contains("output")) {
        const auto& o = j.at("output");
        read_if(o, "dir", cfg.out_dir);
        read_if(o, "record_agent_x", cfg.record_agent_x);
        read_if(o, "record_estimates", cfg.record_estimates);
    }
    if (j.contains("offline")) {
        const auto& o = j.at("offline");
        read_if(o, "c_mw", cfg.offline_c_mw);
        read_if(o, "max_iters", cfg.offline_max_iters);
        read_if(o, "tol_r_mw", cfg.tol_r_mw);
        read_if(o, "tol_x_mw", cfg.tol_x_mw);
        read_if(o, "tol_p", cfg.tol_p);
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << config_to_json(cfg).dump(2) << "\n";
}

}  // namespace loadctrl
