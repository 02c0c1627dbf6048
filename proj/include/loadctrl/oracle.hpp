#pragma once

#include <vector>

#include "loadctrl/disutility.hpp"

namespace loadctrl {

// The centralized problem: minimize sum_i f_i(x_i) over the boxes subject to
// sum_i x_i = C.
struct ProblemInstance {
    std::vector<DisutilityFunction> functions;
    std::vector<Box> boxes;
    double c_mw = 0.0;

    int n() const { return static_cast<int>(functions.size()); }

    // ConfigError on shape mismatch or a non-strongly-convex member;
    // InfeasibleError when C lies outside [sum a_i, sum b_i].
    void validate() const;
};

struct OracleSolution {
    std::vector<double> x_star_mw;
    double y_star = 0.0;
    double p_star = 0.0;
};

// argmin over [a, b] of f(x) + y x; unique for strongly convex f and
// non-increasing in y.
double best_response(const DisutilityFunction& f, const Box& box, double y);

// phi(y) = sum_i best_response(f_i, box_i, y) - C; monotone non-increasing.
double dual_mismatch(const ProblemInstance& p, double y);

// Ground-truth solver: bisection on the single dual variable until
// |phi(y)| <= tol_mw. The returned x satisfies the stationarity system of
// the problem to within tol.
OracleSolution solve(const ProblemInstance& p, double tol_mw);

}  // namespace loadctrl
