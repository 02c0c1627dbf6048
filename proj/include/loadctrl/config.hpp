#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "loadctrl/comm.hpp"
#include "loadctrl/grid.hpp"

namespace loadctrl {

enum class AlgoKind { kDmAdmm, kPjAdmm, kDualAscent, kNone };

enum class DisutilityVariant { kQuadratic, kKinked, kAsymmetric, kMixed };

std::string to_string(AlgoKind a);
AlgoKind algo_from_string(const std::string& s);
std::string to_string(DisutilityVariant v);
DisutilityVariant variant_from_string(const std::string& s);
std::string to_string(CommMode m);
CommMode comm_mode_from_string(const std::string& s);

// Full description of one scenario run. Serializes to a flat-ish JSON file
// with unit-suffixed keys; parse(serialize(cfg)) == cfg.
struct ScenarioConfig {
    int n = 1000;
    std::uint64_t seed = 1;

    DisutilityVariant variant = DisutilityVariant::kKinked;
    bool raw_kink_offset = false;
    double total_b_mw = 60.0;  // sum of upper bounds after normalization

    AlgoKind algo = AlgoKind::kDmAdmm;
    double rho = 2.5e-3;
    // Clamp the penalty to the guaranteed step-size bound for the generated
    // instance. At the default rho and large n the raw value sits far above
    // the bound and the Jacobi loop rings instead of settling.
    bool cap_rho_at_bound = true;
    double pj_tau = 0.0;      // 0 = auto: rho * max(n - 1, 1)
    double pj_gamma = 0.5;
    double dual_gamma = 0.0;  // 0 = auto: the effective rho

    GridParams grid;
    GenerationSchedule schedule = GenerationSchedule::standard();
    bool noise = false;
    double smoothing = 0.0;

    CommMode comm_mode = CommMode::kNone;
    int comm_n0 = 2;

    double horizon_s = 100.0;
    int threads = 1;
    bool record_agent_x = false;
    bool record_estimates = false;

    // Offline (fixed-C) convergence driver settings.
    double offline_c_mw = 6.0;
    std::int64_t offline_max_iters = 100000;
    double tol_r_mw = 1e-6;
    double tol_x_mw = 1e-5;
    double tol_p = 1e-6;

    std::string out_dir;

    void validate() const;

    bool operator==(const ScenarioConfig&) const = default;
};

nlohmann::json config_to_json(const ScenarioConfig& cfg);
ScenarioConfig config_from_json(const nlohmann::json& j);

ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& cfg, const std::string& path);

}  // namespace loadctrl
