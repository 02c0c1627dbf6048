#include "loadctrl/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "loadctrl/errors.hpp"

namespace loadctrl {

void ProblemInstance::validate() const {
    if (functions.empty()) throw ConfigError("instance: needs at least one load");
    if (functions.size() != boxes.size())
        throw ConfigError("instance: functions/boxes size mismatch");
    double sum_a = 0.0, sum_b = 0.0;
    for (std::size_t i = 0; i < functions.size(); ++i) {
        functions[i].validate();
        boxes[i].validate();
        if (!(strong_convexity_modulus(functions[i]) > 0.0))
            throw ConfigError("instance: every disutility must be strongly convex");
        sum_a += boxes[i].a_mw;
        sum_b += boxes[i].b_mw;
    }
    const double slack = 1e-9 * (1.0 + std::abs(sum_a) + std::abs(sum_b));
    if (c_mw < sum_a - slack || c_mw > sum_b + slack)
        throw InfeasibleError("instance: C outside the reachable range [sum a, sum b]");
}

double best_response(const DisutilityFunction& f, const Box& box, double y) {
    return detail::minimize_stage(f, box, y, /*rho=*/0.0, /*c=*/0.0);
}

double dual_mismatch(const ProblemInstance& p, double y) {
    double total = 0.0;
    for (std::size_t i = 0; i < p.functions.size(); ++i)
        total += best_response(p.functions[i], p.boxes[i], y);
    return total - p.c_mw;
}

OracleSolution solve(const ProblemInstance& p, double tol_mw) {
    if (!(tol_mw > 0.0)) throw std::invalid_argument("solve: tol must be > 0");
    p.validate();

    // Initial bracket: +-G covers every load's steepest endpoint slope, then
    // doubled until phi changes sign across it.
    double g_max = 0.0;
    for (std::size_t i = 0; i < p.functions.size(); ++i) {
        const SubgradientInterval sa = subgradient_interval(p.functions[i], p.boxes[i].a_mw);
        const SubgradientInterval sb = subgradient_interval(p.functions[i], p.boxes[i].b_mw);
        g_max = std::max({g_max, std::abs(sa.lo), std::abs(sa.hi), std::abs(sb.lo),
                          std::abs(sb.hi)});
    }
    double y_lo = -(g_max + 1.0);  // phi(y_lo) should be >= 0
    double y_hi = g_max + 1.0;     // phi(y_hi) should be <= 0

    int doublings = 0;
    while (dual_mismatch(p, y_lo) < 0.0) {
        y_lo *= 2.0;
        if (++doublings > 60) throw SolverFailure("solve: no lower bracket found");
    }
    doublings = 0;
    while (dual_mismatch(p, y_hi) > 0.0) {
        y_hi *= 2.0;
        if (++doublings > 60) throw SolverFailure("solve: no upper bracket found");
    }

    double y = 0.5 * (y_lo + y_hi);
    double phi = dual_mismatch(p, y);
    int it = 0;
    while (std::abs(phi) > tol_mw) {
        if (phi > 0.0)
            y_lo = y;
        else
            y_hi = y;
        y = 0.5 * (y_lo + y_hi);
        phi = dual_mismatch(p, y);
        if (++it > 300) throw SolverFailure("solve: bisection failed to converge");
    }

    OracleSolution sol;
    sol.y_star = y;
    sol.x_star_mw.resize(p.functions.size());
    sol.p_star = 0.0;
    for (std::size_t i = 0; i < p.functions.size(); ++i) {
        sol.x_star_mw[i] = best_response(p.functions[i], p.boxes[i], y);
        sol.p_star += evaluate(p.functions[i], sol.x_star_mw[i]);
    }
    return sol;
}

}  // namespace loadctrl
