#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "loadctrl/algorithms.hpp"
#include "loadctrl/errors.hpp"
#include "loadctrl/rng.hpp"
#include "support/search_oracles.hpp"

using namespace loadctrl;

namespace {

AgentState make_agent(int id, DisutilityFunction f, Box box, double x = 0.0,
                      double y = 0.0) {
    return AgentState{id, x, y, box, f};
}

// Stationarity of x within the update's stage objective, box edges included.
bool satisfies_inclusion(const AgentState& a, double y, double rho, double center,
                         double tol) {
    const SubgradientInterval s = subgradient_interval(a.f, a.x_mw);
    const double lo = s.lo + y + rho * (a.x_mw - center);
    const double hi = s.hi + y + rho * (a.x_mw - center);
    if (a.x_mw >= a.box.b_mw - 1e-12) return lo <= tol;
    if (a.x_mw <= a.box.a_mw + 1e-12) return hi >= -tol;
    return lo <= tol && hi >= -tol;
}

}  // namespace

TEST_CASE("dm_admm_step: zero residual at the unconstrained optimum is a fixed point") {
    const auto agent = make_agent(0, DisutilityFunction::quadratic(2.0), Box{-5, 5});
    for (double rho : {1e-3, 0.1, 1.0}) {
        const AgentState next = dm_admm_step(agent, 0.0, DmAdmmParams{rho});
        CHECK(next.x_mw == doctest::Approx(0.0));
        CHECK(next.y == doctest::Approx(0.0));
    }
}

TEST_CASE("dm_admm_step: one-step arithmetic") {
    const auto agent = make_agent(0, DisutilityFunction::quadratic(1.0), Box{-100, 100});
    const DmAdmmParams params{2.5e-3};
    const AgentState next = dm_admm_step(agent, 10.0, params);
    CHECK(next.y == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(next.x_mw == doctest::Approx(-0.05 / 1.0025).epsilon(1e-12));
}

TEST_CASE("dm_admm_step output satisfies the stage optimality inclusion") {
    const CounterRng rng(3);
    for (std::uint64_t lane = 0; lane < 500; ++lane) {
        const double q = rng.uniform(Stream::kTest, lane, 0, 0.3, 3.0);
        const double b = rng.uniform(Stream::kTest, lane, 1, 0.2, 2.0);
        const auto f = lane % 2 == 0
                           ? DisutilityFunction::kinked_quadratic(q, 0.1 * b)
                           : DisutilityFunction::asymmetric_quadratic(
                                 q, rng.uniform(Stream::kTest, lane, 2, 0.3, 3.0));
        AgentState agent = make_agent(0, f, Box{0.0, b},
                                      rng.uniform(Stream::kTest, lane, 3, 0.0, b),
                                      rng.uniform(Stream::kTest, lane, 4, -1.0, 1.0));
        const double r_hat = rng.uniform(Stream::kTest, lane, 5, -5.0, 5.0);
        const DmAdmmParams params{rng.uniform(Stream::kTest, lane, 6, 1e-4, 0.5)};
        const AgentState next = dm_admm_step(agent, r_hat, params);
        CHECK(next.x_mw >= agent.box.a_mw);
        CHECK(next.x_mw <= agent.box.b_mw);
        REQUIRE(satisfies_inclusion(next, next.y, params.rho,
                                    agent.x_mw - r_hat, 1e-8));
    }
}

TEST_CASE("pj_admm_step: stationary when the residual is zero") {
    // Unconstrained minimum of the asymmetric variant sits at 0.
    const auto agent =
        make_agent(0, DisutilityFunction::asymmetric_quadratic(2.0, 1.0), Box{-5, 5});
    const AgentState next = pj_admm_step(agent, 0.0, PjAdmmParams{1.0, 1.0, 0.5});
    CHECK(next.x_mw == doctest::Approx(0.0));
    CHECK(next.y == doctest::Approx(0.0));
}

TEST_CASE("pj_admm_step: closed-form quadratic subproblem") {
    const auto agent = make_agent(0, DisutilityFunction::quadratic(1.0), Box{-10, 10});
    const AgentState next = pj_admm_step(agent, 1.0, PjAdmmParams{1.0, 1.0, 0.5});
    CHECK(next.x_mw == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(next.y == doctest::Approx(0.0));  // dual untouched by the x pass
}

TEST_CASE("pj_admm_step agrees with a grid-search oracle on its stage objective") {
    const CounterRng rng(13);
    for (std::uint64_t lane = 0; lane < 300; ++lane) {
        const double q = rng.uniform(Stream::kTest, lane, 0, 0.3, 3.0);
        const double b = rng.uniform(Stream::kTest, lane, 1, 0.2, 2.0);
        const auto f = lane % 3 == 0 ? DisutilityFunction::quadratic(q)
                       : lane % 3 == 1
                           ? DisutilityFunction::kinked_quadratic(q, 0.1 * b)
                           : DisutilityFunction::asymmetric_quadratic(
                                 q, rng.uniform(Stream::kTest, lane, 2, 0.3, 3.0));
        const AgentState agent =
            make_agent(0, f, Box{0.0, b}, rng.uniform(Stream::kTest, lane, 3, 0.0, b),
                       rng.uniform(Stream::kTest, lane, 4, -1.0, 1.0));
        const double r_hat = rng.uniform(Stream::kTest, lane, 5, -3.0, 3.0);
        const PjAdmmParams params{rng.uniform(Stream::kTest, lane, 6, 1e-3, 1.0),
                                  rng.uniform(Stream::kTest, lane, 7, 1e-3, 2.0), 0.5};
        const AgentState next = pj_admm_step(agent, r_hat, params);

        const auto stage = [&](double x) {
            const double move = x - agent.x_mw + r_hat;
            const double prox = x - agent.x_mw;
            return evaluate(f, x) + agent.y * move + 0.5 * params.rho * move * move +
                   0.5 * params.tau * prox * prox;
        };
        const double x_ref =
            testsupport::grid_trisect_min(stage, agent.box.a_mw, agent.box.b_mw);
        REQUIRE(std::abs(next.x_mw - x_ref) <= 1e-6);
    }
}

TEST_CASE("pj_admm_dual_step applies the damped ascent") {
    const auto agent = make_agent(0, DisutilityFunction::quadratic(1.0), Box{-1, 1},
                                  0.25, 0.1);
    const AgentState next = pj_admm_dual_step(agent, 2.0, PjAdmmParams{0.01, 0.05, 0.5});
    CHECK(next.y == doctest::Approx(0.1 + 0.5 * 0.01 * 2.0).epsilon(1e-14));
    CHECK(next.x_mw == doctest::Approx(0.25));
}

TEST_CASE("dual_ascent_step: smooth case and refusal on kinks") {
    const auto agent = make_agent(0, DisutilityFunction::quadratic(2.0), Box{-10, 10});
    const AgentState fixed = dual_ascent_step(agent, 0.0, DualAscentParams{0.1});
    CHECK(fixed.x_mw == doctest::Approx(0.0));
    CHECK(fixed.y == doctest::Approx(0.0));

    const AgentState next = dual_ascent_step(agent, -4.0, DualAscentParams{0.1});
    CHECK(next.y == doctest::Approx(-0.4).epsilon(1e-14));
    CHECK(next.x_mw == doctest::Approx(0.2).epsilon(1e-12));

    const auto kinked_agent =
        make_agent(0, DisutilityFunction::kinked_quadratic(1.0, 0.1), Box{0, 1});
    CHECK_THROWS_AS(dual_ascent_step(kinked_agent, 1.0, DualAscentParams{0.1}),
                    UnsupportedDisutility);
    const auto asym_agent =
        make_agent(0, DisutilityFunction::asymmetric_quadratic(1.0, 2.0), Box{0, 1});
    CHECK_THROWS_AS(dual_ascent_step(asym_agent, 1.0, DualAscentParams{0.1}),
                    UnsupportedDisutility);
}

TEST_CASE("step_size_bound values and the single-agent sentinel") {
    CHECK(step_size_bound(1.0, 2) == doctest::Approx(0.5));
    CHECK(step_size_bound(0.5, 11) == doctest::Approx(0.025));
    CHECK(std::isinf(step_size_bound(1.0, 1)));
    CHECK_THROWS_AS(step_size_bound(0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(step_size_bound(1.0, 0), std::invalid_argument);
}

TEST_CASE("strong_convexity_xi takes half the weakest modulus") {
    ProblemInstance p;
    p.functions = {DisutilityFunction::quadratic(1.0),
                   DisutilityFunction::quadratic(1.0)};
    p.boxes = {Box{0, 1}, Box{0, 1}};
    p.c_mw = 1.0;
    CHECK(strong_convexity_xi(p) == doctest::Approx(0.5));

    p.functions = {DisutilityFunction::quadratic(2.0),
                   DisutilityFunction::quadratic(0.7),
                   DisutilityFunction::quadratic(1.3)};
    p.boxes = {Box{0, 1}, Box{0, 1}, Box{0, 1}};
    CHECK(strong_convexity_xi(p) == doctest::Approx(0.35));

    // A zero modulus violates the standing strong-convexity assumption;
    // reachable only by bypassing the factory validation.
    DisutilityFunction degenerate;
    degenerate.kind = DisutilityKind::kQuadratic;
    degenerate.q = 0.0;
    p.functions = {degenerate};
    p.boxes = {Box{0, 1}};
    CHECK_THROWS_AS(strong_convexity_xi(p), AssumptionViolation);
}

TEST_CASE("lyapunov_value: definition and the equal-duals guard") {
    OracleSolution sol;
    sol.x_star_mw = {1.0, 2.0};
    sol.y_star = -0.5;
    sol.p_star = 0.0;

    std::vector<AgentState> at_opt = {
        make_agent(0, DisutilityFunction::quadratic(1.0), Box{0, 5}, 1.0, -0.5),
        make_agent(1, DisutilityFunction::quadratic(1.0), Box{0, 5}, 2.0, -0.5)};
    CHECK(lyapunov_value(at_opt, sol, 0.1, 1.0) == doctest::Approx(0.0));

    OracleSolution single;
    single.x_star_mw = {0.0};
    single.y_star = 0.25;
    std::vector<AgentState> one = {
        make_agent(0, DisutilityFunction::quadratic(1.0), Box{-5, 5}, 1.0, 0.25)};
    CHECK(lyapunov_value(one, single, 1.0, 1.0) == doctest::Approx(2.0));

    std::vector<AgentState> split = at_opt;
    split[1].y = -0.5 + 1e-9;
    CHECK_THROWS_AS(lyapunov_value(split, sol, 0.1, 1.0), AssumptionViolation);
}

namespace {

struct OfflineRun {
    std::vector<AgentState> agents;
    std::vector<double> residuals;
    std::vector<double> x_dist;
    std::vector<double> lyapunov;
    double min_lyapunov_slack = std::numeric_limits<double>::infinity();
    double max_dual_gap = 0.0;
    OracleSolution oracle;
    double xi = 0.0;
};

// Plain exact-residual iteration used to exercise the update rules directly.
OfflineRun iterate_dm(const ProblemInstance& p, double rho, int iters) {
    OfflineRun run;
    run.oracle = solve(p, 1e-9);
    run.xi = strong_convexity_xi(p);
    for (int i = 0; i < p.n(); ++i)
        run.agents.push_back(make_agent(i, p.functions[static_cast<std::size_t>(i)],
                                        p.boxes[static_cast<std::size_t>(i)]));
    const DmAdmmParams params{rho};
    std::vector<double> x_prev(run.agents.size());
    double prev_v = 0.0, prev_r = 0.0;
    bool have_prev = false;
    for (int k = 0; k < iters; ++k) {
        double r = 0.0;
        for (const AgentState& a : run.agents) r += a.x_mw;
        r -= p.c_mw;
        run.residuals.push_back(r);
        double d2 = 0.0;
        for (std::size_t i = 0; i < run.agents.size(); ++i) {
            x_prev[i] = run.agents[i].x_mw;
            const double d = run.agents[i].x_mw - run.oracle.x_star_mw[i];
            d2 += d * d;
        }
        run.x_dist.push_back(std::sqrt(d2));

        std::vector<AgentState> next(run.agents.size());
        for (std::size_t i = 0; i < run.agents.size(); ++i)
            next[i] = dm_admm_step(run.agents[i], r, params);
        run.agents.swap(next);

        for (const AgentState& a : run.agents)
            run.max_dual_gap =
                std::max(run.max_dual_gap, std::abs(a.y - run.agents.front().y));

        const double v =
            lyapunov_value(x_prev, run.agents.front().y, run.oracle, rho, run.xi);
        run.lyapunov.push_back(v);
        if (have_prev)
            run.min_lyapunov_slack =
                std::min(run.min_lyapunov_slack, prev_v - v - rho * prev_r * prev_r);
        prev_v = v;
        prev_r = r;
        have_prev = true;
    }
    return run;
}

ProblemInstance mixed_instance(std::uint64_t seed, int n, double c_fraction) {
    const CounterRng rng(seed);
    ProblemInstance p;
    double sum_b = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::uint64_t lane = static_cast<std::uint64_t>(i);
        const double q = 1.0 / rng.uniform(Stream::kTest, lane, 0, 1.0, 3.0);
        const double b = rng.uniform(Stream::kTest, lane, 1, 0.5, 2.0);
        switch (i % 3) {
            case 0: p.functions.push_back(DisutilityFunction::quadratic(q)); break;
            case 1:
                p.functions.push_back(DisutilityFunction::kinked_quadratic(q, 0.1 * b));
                break;
            default:
                p.functions.push_back(DisutilityFunction::asymmetric_quadratic(
                    q, 1.0 / rng.uniform(Stream::kTest, lane, 2, 1.0, 3.0)));
                break;
        }
        p.boxes.push_back(Box{0.0, b});
        sum_b += b;
    }
    p.c_mw = c_fraction * sum_b;
    return p;
}

}  // namespace

TEST_CASE("exact-residual iteration: consensus, certificate decrease, convergence") {
    const ProblemInstance p = mixed_instance(7, 10, 0.5);
    const double xi = strong_convexity_xi(p);
    const double rho = std::min(2.5e-3, step_size_bound(xi, p.n()));
    const OfflineRun run = iterate_dm(p, rho, 3000);

    // Identical arithmetic path keeps the duals exactly equal.
    CHECK(run.max_dual_gap == 0.0);
    // Certificate decreases by at least rho r^2 every iteration.
    CHECK(run.min_lyapunov_slack >= -1e-9);
    // Residual inside tolerance within the budget.
    CHECK(std::abs(run.residuals.back()) <= 1e-6);
    double sum_x = 0.0;
    for (const AgentState& a : run.agents) sum_x += a.x_mw;
    CHECK(std::abs(sum_x - p.c_mw) <= 1e-6);
}

TEST_CASE("iterate convergence under the tightened bound") {
    // rho <= (xi - sigma) / (2 (n - 1)) with sigma = xi/2, i.e. half the bound.
    const ProblemInstance p = mixed_instance(11, 8, 0.4);
    const double xi = strong_convexity_xi(p);
    const double rho = 0.5 * step_size_bound(xi, p.n());
    const OfflineRun run = iterate_dm(p, rho, 6000);

    CHECK(run.x_dist.back() <= 1e-5);
    double obj = 0.0;
    for (const AgentState& a : run.agents) obj += evaluate(a.f, a.x_mw);
    CHECK(std::abs(obj - run.oracle.p_star) <= 1e-6);
}

TEST_CASE("quadratic instances decay at an empirically linear rate") {
    ProblemInstance p = mixed_instance(19, 10, 0.5);
    for (std::size_t i = 0; i < p.functions.size(); ++i)
        p.functions[i] = DisutilityFunction::quadratic(
            strong_convexity_modulus(p.functions[i]));
    const double xi = strong_convexity_xi(p);
    const double rho = std::min(2.5e-3, step_size_bound(xi, p.n()));
    const OfflineRun run = iterate_dm(p, rho, 4000);

    // Regress over the stretch between 20% of the way to convergence and the
    // point where the oracle's own accuracy floor takes over.
    std::size_t settled = run.x_dist.size();
    for (std::size_t k = 0; k < run.x_dist.size(); ++k)
        if (run.x_dist[k] <= 1e-8) {
            settled = k;
            break;
        }
    std::vector<double> logs;
    for (std::size_t k = settled / 5; k < settled; ++k)
        logs.push_back(std::log(run.x_dist[k]));
    REQUIRE(logs.size() >= 16);
    // Least-squares fit of log distance against iteration index.
    double mt = 0, my = 0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        mt += static_cast<double>(i);
        my += logs[i];
    }
    mt /= static_cast<double>(logs.size());
    my /= static_cast<double>(logs.size());
    double stt = 0, sty = 0, syy = 0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const double dt = static_cast<double>(i) - mt;
        const double dy = logs[i] - my;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    const double slope = sty / stt;
    const double r2 = sty * sty / (stt * syy);
    CHECK(slope < 0.0);
    CHECK(r2 > 0.95);
}
