#pragma once

#include <array>
#include <cstddef>

namespace loadctrl {

enum class DisutilityKind {
    kQuadratic,            // f(x) = q/2 x^2
    kKinkedQuadratic,      // f(x) = q x^2 on |x| <= eta, 3 q x^2 - 2 q eta^2 outside
    kAsymmetricQuadratic,  // f(x) = q_minus/2 x^2 for x < 0, q_plus/2 x^2 for x >= 0
};

// Scalar convex cost of deviating consumption by x MW from nominal.
//
// All variants are continuous, convex, and strongly convex; the kinked and
// asymmetric ones are not twice continuously differentiable. The kinked
// offset -2 q eta^2 makes the outer branch meet q eta^2 at |x| = eta;
// raw_kink_offset = true switches to the offset -q eta (discontinuous at the
// kink unless eta = 1/2), kept only for side-by-side comparison runs and
// carrying no convergence guarantees.
struct DisutilityFunction {
    DisutilityKind kind = DisutilityKind::kQuadratic;
    double q = 1.0;        // curvature, kQuadratic / kKinkedQuadratic
    double eta_mw = 0.0;   // kink location, kKinkedQuadratic
    double q_minus = 1.0;  // x < 0 curvature, kAsymmetricQuadratic
    double q_plus = 1.0;   // x >= 0 curvature, kAsymmetricQuadratic
    bool raw_kink_offset = false;

    static DisutilityFunction quadratic(double q);
    static DisutilityFunction kinked_quadratic(double q, double eta_mw,
                                               bool raw_offset = false);
    static DisutilityFunction asymmetric_quadratic(double q_minus, double q_plus);

    // Throws ConfigError when a curvature is non-positive or eta < 0.
    void validate() const;

    bool operator==(const DisutilityFunction&) const = default;
};

// Feasible consumption-change interval [a, b] in MW.
struct Box {
    double a_mw = 0.0;
    double b_mw = 0.0;

    void validate() const;  // ConfigError when a > b
    double clamp(double x) const;

    bool operator==(const Box&) const = default;
};

// Closed subdifferential [lo, hi] of f at a point; lo == hi wherever f is
// differentiable.
struct SubgradientInterval {
    double lo = 0.0;
    double hi = 0.0;
};

double evaluate(const DisutilityFunction& f, double x_mw);
SubgradientInterval subgradient_interval(const DisutilityFunction& f, double x_mw);

// Largest m such that f(x) - m/2 x^2 stays convex: q for quadratic, 2q for
// kinked, min(q_minus, q_plus) for asymmetric.
double strong_convexity_modulus(const DisutilityFunction& f);

// argmin over [a, b] of f(x) + y x + rho/2 (x - c)^2, exact for the built-in
// piecewise-quadratic variants. Requires rho > 0.
double prox_step(const DisutilityFunction& f, const Box& box, double y, double rho,
                 double c_mw);

// Same minimizer found by bisection on the monotone subgradient of the stage
// objective; fallback path for function shapes without a closed form.
// Throws SolverFailure if the bisection fails to localize the root.
double prox_step_bisection(const DisutilityFunction& f, const Box& box, double y,
                           double rho, double c_mw);

namespace detail {

// One quadratic branch a2 x^2 + a1 x + a0 valid on [lo, hi].
struct QuadPiece {
    double lo, hi;
    double a2, a1, a0;
};

struct PieceSet {
    std::array<QuadPiece, 3> pieces;
    std::size_t count = 0;
};

PieceSet decompose(const DisutilityFunction& f);

// argmin over [a, b] of f(x) + y x + rho/2 (x - c)^2 with rho >= 0. With
// rho = 0 every branch must be strictly convex (true for all variants).
double minimize_stage(const DisutilityFunction& f, const Box& box, double y,
                      double rho, double c);

}  // namespace detail

}  // namespace loadctrl
