#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "loadctrl/grid.hpp"

namespace loadctrl {

// Columnar per-step record of a closed-loop run. Row k is the snapshot at
// t = k T before any step-k activity: the consumption it reports is the one
// the grid is about to integrate and the residual is the one the estimators
// are about to recover.
struct Trace {
    std::vector<std::int64_t> k;
    std::vector<double> t_s;
    std::vector<double> omega_hz;
    std::vector<double> g_mw;
    std::vector<double> sum_x_mw;
    std::vector<double> r_mw;     // true residual sum_x - C(t)
    std::vector<double> p_obj;    // total disutility
    std::vector<double> v_lyap;   // diagnostic value; 0 where not defined

    // Optional extras (not part of the CSV format).
    std::vector<std::vector<double>> agent_x_mw;
    std::vector<double> est_err_max_mw;           // per step, max_i |r_hat_i - r|
    std::vector<std::vector<double>> est_err_mw;  // per step, per agent

    // Run metadata used by metrics and writers.
    double omega0_hz = 60.0;
    double t_step_s = 0.1;
    GenerationSchedule schedule;

    std::size_t size() const { return k.size(); }

    bool operator==(const Trace&) const = default;
};

// Fixed header `k,t_s,omega_hz,g_mw,sum_x_mw,r_mw,p_obj,v_lyap`, one row per
// record, doubles printed with round-trip precision.
void write_trace_csv(const Trace& trace, std::ostream& out);
std::string trace_to_csv(const Trace& trace);
void save_trace_csv(const Trace& trace, const std::string& path);

// Reductions over one schedule window.
struct WindowMetrics {
    double t_begin_s = 0.0;
    double t_end_s = 0.0;
    double c_mw = 0.0;                 // balance constant in effect
    double max_abs_domega_hz = 0.0;
    double steady_abs_domega_hz = 0.0; // mean |dw| over the final tenth
    double min_domega_hz = 0.0;        // deepest dip
    double overshoot_hz = 0.0;         // highest excursion above nominal
};

struct Metrics {
    std::vector<WindowMetrics> windows;
    double max_abs_domega_hz = 0.0;
    double p_end = 0.0;
};

// std::invalid_argument on an empty trace.
Metrics compute_metrics(const Trace& trace);

nlohmann::json metrics_to_json(const Metrics& m);

}  // namespace loadctrl
