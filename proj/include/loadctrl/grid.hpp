#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace loadctrl {

// Single-machine micro-grid model. Continuous-time dynamics of the state
// [delta_omega, p_gov]:
//   M d(delta_omega)/dt = -D delta_omega + p_gov + u
//   T_g d(p_gov)/dt     = -p_gov - delta_omega / R
// with the aggregate input u = (g - g0) + sum_x + zeta. Discretized with a
// zero-order hold at step T, forward Euler by default or the exact matrix
// exponential when exact_discretization is set.
struct GridParams {
    double t_step_s = 0.1;          // discretization interval T
    double inertia_mw_s2 = 10.0;    // M
    double damping_mw_s = 1.0;      // D
    double droop_hz_per_mw = 0.05;  // R: steady governor output is -delta_omega / R
    double governor_tc_s = 5.0;     // T_g
    double omega0_hz = 60.0;
    double sigma_zeta_mw = 0.1;   // process-noise std
    double sigma_delta_hz = 1e-3; // per-load measurement-noise std
    bool exact_discretization = false;

    void validate() const;

    bool operator==(const GridParams&) const = default;
};

struct GridState {
    double delta_omega_hz = 0.0;  // frequency deviation from omega0
    double p_gov_mw = 0.0;        // governor/turbine power adjustment
    std::int64_t k = 0;

    bool operator==(const GridState&) const = default;
};

// One-step transition x+ = phi x + gamma u for x = [delta_omega, p_gov].
struct GridDiscretization {
    double phi[2][2] = {{0, 0}, {0, 0}};
    double gamma[2] = {0, 0};

    static GridDiscretization from(const GridParams& p);
};

GridState grid_step(const GridState& state, const GridParams& params,
                    double total_x_mw, double g_mw, double g0_mw, double zeta_mw);

// omega_hat = omega0 + delta_omega + delta (per-load measurement noise).
double measure_frequency(const GridState& state, const GridParams& params,
                         double delta_hz);

// Piecewise-constant, right-continuous generation profile.
struct GenerationSchedule {
    std::vector<std::pair<double, double>> breakpoints;  // (t_s, g_mw), ascending

    void validate() const;  // ConfigError on empty/unsorted/negative-time input
    double nominal_mw() const;

    // 200 MW on [0, 20), 190 on [20, 50), 170 from 50 s.
    static GenerationSchedule standard();

    bool operator==(const GenerationSchedule&) const = default;
};

double scheduled_generation(const GenerationSchedule& sched, double t_s);

}  // namespace loadctrl
