#pragma once

#include <span>
#include <vector>

#include "loadctrl/disutility.hpp"
#include "loadctrl/oracle.hpp"

namespace loadctrl {

// One load's view of the optimization: primal consumption change x, dual
// price y, feasible box, and its own disutility.
struct AgentState {
    int id = 0;
    double x_mw = 0.0;
    double y = 0.0;
    Box box;
    DisutilityFunction f;
};

struct DmAdmmParams {
    double rho = 2.5e-3;  // penalty, price per MW

    void validate() const;
};

// Proximal-Jacobian comparator parameters. tau damps each block's move, and
// the dual update is scaled by gamma and applied by the driver once the
// post-update residual is visible.
struct PjAdmmParams {
    double rho = 2.5e-3;
    double tau = 2.5e-3;
    double gamma = 0.5;

    void validate() const;
    // tau = rho * max(n - 1, 1), gamma = 0.5.
    static PjAdmmParams defaults_for(double rho, int n);
};

struct DualAscentParams {
    double gamma = 2.5e-3;  // dual step size

    void validate() const;
};

// One full agent update: y' = y + rho r_hat, then the box-constrained
// proximal step centered at x - r_hat. Deterministic in its inputs.
AgentState dm_admm_step(const AgentState& agent, double r_hat_mw,
                        const DmAdmmParams& params);

// Jacobi x-update only:
//   x' = argmin over the box of f(x) + y (x - x_old + r_hat)
//        + rho/2 (x - x_old + r_hat)^2 + tau/2 (x - x_old)^2.
// The damped dual update is a separate pass (pj_admm_dual_step) executed by
// the driver after all x-updates, with the residual those updates produced.
AgentState pj_admm_step(const AgentState& agent, double r_hat_mw,
                        const PjAdmmParams& params);

// y' = y + gamma rho r_hat; x unchanged.
AgentState pj_admm_dual_step(const AgentState& agent, double r_hat_mw,
                             const PjAdmmParams& params);

// Price-based comparator: y' = y + gamma r_hat, x' = best_response(f, box, y').
// Refuses non-smooth disutilities (UnsupportedDisutility) -- it needs a
// well-defined derivative everywhere.
AgentState dual_ascent_step(const AgentState& agent, double r_hat_mw,
                            const DualAscentParams& params);

// Largest penalty with a convergence guarantee: xi / (2 (n - 1)); +infinity
// for a single agent.
double step_size_bound(double xi, int n);

// xi = 1/2 min_i strong_convexity_modulus(f_i). AssumptionViolation when any
// modulus is zero.
double strong_convexity_xi(const ProblemInstance& p);

// V = 1/rho (y - y*)^2 + (rho + xi) sum_i (x_i - x_i*)^2, where y is the
// common dual value one dual-update ahead of x. The agent-span overload
// checks the common-dual assumption (AssumptionViolation beyond 1e-12).
double lyapunov_value(std::span<const double> x_mw, double y,
                      const OracleSolution& sol, double rho, double xi);
double lyapunov_value(std::span<const AgentState> agents, const OracleSolution& sol,
                      double rho, double xi);

// Certificate data accumulated along a diagnosed run.
struct ConvergenceCertificate {
    double xi = 0.0;
    double rho_max = 0.0;
    std::vector<double> lyapunov;
};

}  // namespace loadctrl
