#include "loadctrl/disutility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loadctrl/errors.hpp"

namespace loadctrl {

DisutilityFunction DisutilityFunction::quadratic(double q) {
    DisutilityFunction f;
    f.kind = DisutilityKind::kQuadratic;
    f.q = q;
    f.validate();
    return f;
}

DisutilityFunction DisutilityFunction::kinked_quadratic(double q, double eta_mw,
                                                        bool raw_offset) {
    DisutilityFunction f;
    f.kind = DisutilityKind::kKinkedQuadratic;
    f.q = q;
    f.eta_mw = eta_mw;
    f.raw_kink_offset = raw_offset;
    f.validate();
    return f;
}

DisutilityFunction DisutilityFunction::asymmetric_quadratic(double q_minus,
                                                            double q_plus) {
    DisutilityFunction f;
    f.kind = DisutilityKind::kAsymmetricQuadratic;
    f.q_minus = q_minus;
    f.q_plus = q_plus;
    f.validate();
    return f;
}

void DisutilityFunction::validate() const {
    switch (kind) {
        case DisutilityKind::kQuadratic:
            if (!(q > 0.0)) throw ConfigError("disutility: curvature q must be > 0");
            break;
        case DisutilityKind::kKinkedQuadratic:
            if (!(q > 0.0)) throw ConfigError("disutility: curvature q must be > 0");
            if (!(eta_mw >= 0.0)) throw ConfigError("disutility: eta must be >= 0");
            break;
        case DisutilityKind::kAsymmetricQuadratic:
            if (!(q_minus > 0.0) || !(q_plus > 0.0))
                throw ConfigError("disutility: curvatures q-, q+ must be > 0");
            break;
    }
}

void Box::validate() const {
    if (!(a_mw <= b_mw)) throw ConfigError("box: requires a <= b");
}

double Box::clamp(double x) const { return std::min(std::max(x, a_mw), b_mw); }

namespace detail {

PieceSet decompose(const DisutilityFunction& f) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    PieceSet s;
    switch (f.kind) {
        case DisutilityKind::kQuadratic:
            s.pieces[0] = {-kInf, kInf, 0.5 * f.q, 0.0, 0.0};
            s.count = 1;
            break;
        case DisutilityKind::kKinkedQuadratic: {
            const double off = f.raw_kink_offset ? -f.q * f.eta_mw
                                                 : -2.0 * f.q * f.eta_mw * f.eta_mw;
            s.pieces[0] = {-kInf, -f.eta_mw, 3.0 * f.q, 0.0, off};
            s.pieces[1] = {-f.eta_mw, f.eta_mw, f.q, 0.0, 0.0};
            s.pieces[2] = {f.eta_mw, kInf, 3.0 * f.q, 0.0, off};
            s.count = 3;
            break;
        }
        case DisutilityKind::kAsymmetricQuadratic:
            s.pieces[0] = {-kInf, 0.0, 0.5 * f.q_minus, 0.0, 0.0};
            s.pieces[1] = {0.0, kInf, 0.5 * f.q_plus, 0.0, 0.0};
            s.count = 2;
            break;
    }
    return s;
}

double minimize_stage(const DisutilityFunction& f, const Box& box, double y,
                      double rho, double c) {
    // The stage objective g(x) = f(x) + y x + rho/2 (x - c)^2 is piecewise
    // quadratic, so its box-constrained minimizer is a branch stationary
    // point clipped to the branch, a breakpoint, or a box endpoint. Evaluate
    // every candidate and keep the best; exact and branch-order
    // deterministic.
    const PieceSet set = decompose(f);
    const auto stage = [&](double x) {
        const double d = x - c;
        return evaluate(f, x) + y * x + 0.5 * rho * d * d;
    };

    double best_x = box.a_mw;
    double best_g = stage(best_x);
    const auto consider = [&](double x) {
        const double g = stage(x);
        if (g < best_g) {
            best_g = g;
            best_x = x;
        }
    };
    consider(box.b_mw);

    for (std::size_t i = 0; i < set.count; ++i) {
        const QuadPiece& p = set.pieces[i];
        const double lo = std::max(p.lo, box.a_mw);
        const double hi = std::min(p.hi, box.b_mw);
        if (lo > hi) continue;
        // d/dx [a2 x^2 + a1 x + y x + rho/2 (x-c)^2] = 0
        const double denom = 2.0 * p.a2 + rho;
        if (denom > 0.0) {
            const double xs = (rho * c - y - p.a1) / denom;
            consider(std::min(std::max(xs, lo), hi));
        } else {
            consider(lo);
            consider(hi);
        }
    }
    return best_x;
}

}  // namespace detail

double evaluate(const DisutilityFunction& f, double x_mw) {
    const double x = x_mw;
    switch (f.kind) {
        case DisutilityKind::kQuadratic:
            return 0.5 * f.q * x * x;
        case DisutilityKind::kKinkedQuadratic: {
            const double inner = f.q * x * x;
            const double off = f.raw_kink_offset ? -f.q * f.eta_mw
                                                 : -2.0 * f.q * f.eta_mw * f.eta_mw;
            const double outer = 3.0 * f.q * x * x + off;
            if (std::abs(x) < f.eta_mw) return inner;
            if (std::abs(x) > f.eta_mw) return outer;
            // Both branch conditions include |x| = eta; the lower value is
            // the lower semi-continuous reading (they coincide for the
            // corrected offset).
            return std::min(inner, outer);
        }
        case DisutilityKind::kAsymmetricQuadratic:
            return x < 0.0 ? 0.5 * f.q_minus * x * x : 0.5 * f.q_plus * x * x;
    }
    return 0.0;
}

SubgradientInterval subgradient_interval(const DisutilityFunction& f, double x_mw) {
    const double x = x_mw;
    switch (f.kind) {
        case DisutilityKind::kQuadratic:
            return {f.q * x, f.q * x};
        case DisutilityKind::kKinkedQuadratic: {
            const double eta = f.eta_mw;
            if (x > eta || x < -eta) return {6.0 * f.q * x, 6.0 * f.q * x};
            if (x < eta && x > -eta) return {2.0 * f.q * x, 2.0 * f.q * x};
            // One-sided slopes 2 q eta and 6 q eta meet at the kink.
            if (x == eta) return {2.0 * f.q * eta, 6.0 * f.q * eta};
            return {-6.0 * f.q * eta, -2.0 * f.q * eta};
        }
        case DisutilityKind::kAsymmetricQuadratic:
            if (x < 0.0) return {f.q_minus * x, f.q_minus * x};
            return {f.q_plus * x, f.q_plus * x};
    }
    return {};
}

double strong_convexity_modulus(const DisutilityFunction& f) {
    switch (f.kind) {
        case DisutilityKind::kQuadratic:
            return f.q;
        case DisutilityKind::kKinkedQuadratic:
            return 2.0 * f.q;
        case DisutilityKind::kAsymmetricQuadratic:
            return std::min(f.q_minus, f.q_plus);
    }
    return 0.0;
}

double prox_step(const DisutilityFunction& f, const Box& box, double y, double rho,
                 double c_mw) {
    if (!(rho > 0.0)) throw std::invalid_argument("prox_step: rho must be > 0");
    box.validate();
    return detail::minimize_stage(f, box, y, rho, c_mw);
}

double prox_step_bisection(const DisutilityFunction& f, const Box& box, double y,
                           double rho, double c_mw) {
    if (!(rho > 0.0))
        throw std::invalid_argument("prox_step_bisection: rho must be > 0");
    box.validate();

    // The stage subgradient x -> [lo, hi] + y + rho (x - c) is monotone
    // increasing; the minimizer is the box-clamped point where it brackets 0.
    const auto slope = [&](double x) {
        const SubgradientInterval s = subgradient_interval(f, x);
        const double shift = y + rho * (x - c_mw);
        return SubgradientInterval{s.lo + shift, s.hi + shift};
    };

    double lo = box.a_mw;
    double hi = box.b_mw;
    if (slope(lo).hi >= 0.0) return lo;
    if (slope(hi).lo <= 0.0) return hi;

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const SubgradientInterval s = slope(mid);
        if (s.lo <= 0.0 && s.hi >= 0.0) return mid;
        if (s.hi < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)))
            return 0.5 * (lo + hi);
    }
    throw SolverFailure("prox_step_bisection: subgradient root not localized");
}

}  // namespace loadctrl
