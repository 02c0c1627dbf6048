#include "loadctrl/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loadctrl/errors.hpp"

namespace loadctrl {

void DmAdmmParams::validate() const {
    if (!(rho > 0.0)) throw ConfigError("dm-admm: rho must be > 0");
}

void PjAdmmParams::validate() const {
    if (!(rho > 0.0)) throw ConfigError("pj-admm: rho must be > 0");
    if (!(tau > 0.0)) throw ConfigError("pj-admm: tau must be > 0");
    if (!(gamma > 0.0 && gamma < 2.0)) throw ConfigError("pj-admm: gamma must be in (0, 2)");
}

PjAdmmParams PjAdmmParams::defaults_for(double rho, int n) {
    PjAdmmParams p;
    p.rho = rho;
    p.tau = rho * static_cast<double>(std::max(n - 1, 1));
    p.gamma = 0.5;
    p.validate();
    return p;
}

void DualAscentParams::validate() const {
    if (!(gamma > 0.0)) throw ConfigError("dual-ascent: gamma must be > 0");
}

AgentState dm_admm_step(const AgentState& agent, double r_hat_mw,
                        const DmAdmmParams& params) {
    AgentState next = agent;
    next.y = agent.y + params.rho * r_hat_mw;
    next.x_mw = prox_step(agent.f, agent.box, next.y, params.rho,
                          agent.x_mw - r_hat_mw);
    return next;
}

AgentState pj_admm_step(const AgentState& agent, double r_hat_mw,
                        const PjAdmmParams& params) {
    // The two quadratic pulls, rho/2 (x - (x_old - r_hat))^2 and
    // tau/2 (x - x_old)^2, combine into one of weight rho + tau centered at
    // their weighted mean.
    const double weight = params.rho + params.tau;
    const double center = (params.rho * (agent.x_mw - r_hat_mw) +
                           params.tau * agent.x_mw) /
                          weight;
    AgentState next = agent;
    next.x_mw = prox_step(agent.f, agent.box, agent.y, weight, center);
    return next;
}

AgentState pj_admm_dual_step(const AgentState& agent, double r_hat_mw,
                             const PjAdmmParams& params) {
    AgentState next = agent;
    next.y = agent.y + params.gamma * params.rho * r_hat_mw;
    return next;
}

AgentState dual_ascent_step(const AgentState& agent, double r_hat_mw,
                            const DualAscentParams& params) {
    if (agent.f.kind != DisutilityKind::kQuadratic)
        throw UnsupportedDisutility(
            "dual-ascent: requires a smooth (quadratic) disutility");
    AgentState next = agent;
    next.y = agent.y + params.gamma * r_hat_mw;
    next.x_mw = best_response(agent.f, agent.box, next.y);
    return next;
}

double step_size_bound(double xi, int n) {
    if (!(xi > 0.0)) throw std::invalid_argument("step_size_bound: xi must be > 0");
    if (n < 1) throw std::invalid_argument("step_size_bound: n must be >= 1");
    if (n == 1) return std::numeric_limits<double>::infinity();
    return xi / (2.0 * static_cast<double>(n - 1));
}

double strong_convexity_xi(const ProblemInstance& p) {
    if (p.functions.empty())
        throw std::invalid_argument("strong_convexity_xi: empty instance");
    double min_modulus = std::numeric_limits<double>::infinity();
    for (const DisutilityFunction& f : p.functions)
        min_modulus = std::min(min_modulus, strong_convexity_modulus(f));
    if (!(min_modulus > 0.0))
        throw AssumptionViolation(
            "strong_convexity_xi: a load has zero strong-convexity modulus");
    return 0.5 * min_modulus;
}

double lyapunov_value(std::span<const double> x_mw, double y,
                      const OracleSolution& sol, double rho, double xi) {
    if (x_mw.size() != sol.x_star_mw.size())
        throw std::invalid_argument("lyapunov_value: size mismatch with solution");
    if (!(rho > 0.0)) throw std::invalid_argument("lyapunov_value: rho must be > 0");
    const double dy = y - sol.y_star;
    double dist2 = 0.0;
    for (std::size_t i = 0; i < x_mw.size(); ++i) {
        const double d = x_mw[i] - sol.x_star_mw[i];
        dist2 += d * d;
    }
    return dy * dy / rho + (rho + xi) * dist2;
}

double lyapunov_value(std::span<const AgentState> agents, const OracleSolution& sol,
                      double rho, double xi) {
    if (agents.empty()) throw std::invalid_argument("lyapunov_value: no agents");
    const double y0 = agents.front().y;
    std::vector<double> xs;
    xs.reserve(agents.size());
    for (const AgentState& a : agents) {
        if (std::abs(a.y - y0) > 1e-12)
            throw AssumptionViolation("lyapunov_value: agents' duals are not equal");
        xs.push_back(a.x_mw);
    }
    return lyapunov_value(xs, y0, sol, rho, xi);
}

}  // namespace loadctrl
