#include "loadctrl/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "loadctrl/errors.hpp"

namespace loadctrl {

void GridParams::validate() const {
    if (!(t_step_s > 0.0)) throw ConfigError("grid: T must be > 0");
    if (!(inertia_mw_s2 > 0.0)) throw ConfigError("grid: M must be > 0");
    if (!(damping_mw_s > 0.0)) throw ConfigError("grid: D must be > 0");
    if (!(droop_hz_per_mw > 0.0)) throw ConfigError("grid: R must be > 0");
    if (!(governor_tc_s > 0.0)) throw ConfigError("grid: T_g must be > 0");
    if (!(sigma_zeta_mw >= 0.0) || !(sigma_delta_hz >= 0.0))
        throw ConfigError("grid: noise stds must be >= 0");
}

namespace {

// expm of a 2x2 matrix, closed form via the trace/deviator split.
void expm2(const double a[2][2], double out[2][2]) {
    const double mu = 0.5 * (a[0][0] + a[1][1]);
    const double d00 = a[0][0] - mu, d11 = a[1][1] - mu;
    const double disc = d00 * d00 + a[0][1] * a[1][0];  // d00 = -d11
    double cosh_w = 1.0, sinhc_w = 1.0;                 // disc == 0 limit
    if (disc > 0.0) {
        const double w = std::sqrt(disc);
        cosh_w = std::cosh(w);
        sinhc_w = std::sinh(w) / w;
    } else if (disc < 0.0) {
        const double w = std::sqrt(-disc);
        cosh_w = std::cos(w);
        sinhc_w = std::sin(w) / w;
    }
    const double e = std::exp(mu);
    out[0][0] = e * (cosh_w + sinhc_w * d00);
    out[0][1] = e * sinhc_w * a[0][1];
    out[1][0] = e * sinhc_w * a[1][0];
    out[1][1] = e * (cosh_w + sinhc_w * d11);
}

}  // namespace

GridDiscretization GridDiscretization::from(const GridParams& p) {
    p.validate();
    const double t = p.t_step_s;
    const double a[2][2] = {
        {-p.damping_mw_s / p.inertia_mw_s2, 1.0 / p.inertia_mw_s2},
        {-1.0 / (p.governor_tc_s * p.droop_hz_per_mw), -1.0 / p.governor_tc_s},
    };
    const double b[2] = {1.0 / p.inertia_mw_s2, 0.0};

    GridDiscretization d;
    if (!p.exact_discretization) {
        d.phi[0][0] = 1.0 + t * a[0][0];
        d.phi[0][1] = t * a[0][1];
        d.phi[1][0] = t * a[1][0];
        d.phi[1][1] = 1.0 + t * a[1][1];
        d.gamma[0] = t * b[0];
        d.gamma[1] = t * b[1];
        return d;
    }

    const double at[2][2] = {{a[0][0] * t, a[0][1] * t}, {a[1][0] * t, a[1][1] * t}};
    expm2(at, d.phi);
    // gamma = A^-1 (phi - I) B; A is invertible (det = (D + 1/R)/(M T_g) > 0).
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    const double inv[2][2] = {{a[1][1] / det, -a[0][1] / det},
                              {-a[1][0] / det, a[0][0] / det}};
    const double m[2][2] = {{d.phi[0][0] - 1.0, d.phi[0][1]},
                            {d.phi[1][0], d.phi[1][1] - 1.0}};
    const double mb[2] = {m[0][0] * b[0] + m[0][1] * b[1],
                          m[1][0] * b[0] + m[1][1] * b[1]};
    d.gamma[0] = inv[0][0] * mb[0] + inv[0][1] * mb[1];
    d.gamma[1] = inv[1][0] * mb[0] + inv[1][1] * mb[1];
    return d;
}

GridState grid_step(const GridState& state, const GridParams& params,
                    double total_x_mw, double g_mw, double g0_mw, double zeta_mw) {
    const GridDiscretization d = GridDiscretization::from(params);
    const double u = (g_mw - g0_mw) + total_x_mw + zeta_mw;
    GridState next;
    next.delta_omega_hz = d.phi[0][0] * state.delta_omega_hz +
                          d.phi[0][1] * state.p_gov_mw + d.gamma[0] * u;
    next.p_gov_mw = d.phi[1][0] * state.delta_omega_hz +
                    d.phi[1][1] * state.p_gov_mw + d.gamma[1] * u;
    next.k = state.k + 1;
    return next;
}

double measure_frequency(const GridState& state, const GridParams& params,
                         double delta_hz) {
    return params.omega0_hz + state.delta_omega_hz + delta_hz;
}

void GenerationSchedule::validate() const {
    if (breakpoints.empty()) throw ConfigError("schedule: needs at least one segment");
    if (breakpoints.front().first != 0.0)
        throw ConfigError("schedule: first segment must start at t = 0");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i].first > breakpoints[i - 1].first))
            throw ConfigError("schedule: breakpoint times must be strictly increasing");
}

double GenerationSchedule::nominal_mw() const {
    validate();
    return breakpoints.front().second;
}

GenerationSchedule GenerationSchedule::standard() {
    return GenerationSchedule{{{0.0, 200.0}, {20.0, 190.0}, {50.0, 170.0}}};
}

double scheduled_generation(const GenerationSchedule& sched, double t_s) {
    sched.validate();
    if (t_s < 0.0) throw std::invalid_argument("scheduled_generation: t must be >= 0");
    double g = sched.breakpoints.front().second;
    for (const auto& [t, value] : sched.breakpoints) {
        if (t_s >= t) g = value;  // right-continuous
        else break;
    }
    return g;
}

}  // namespace loadctrl
