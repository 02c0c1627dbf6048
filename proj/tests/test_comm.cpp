#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "loadctrl/comm.hpp"
#include "loadctrl/errors.hpp"
#include "loadctrl/rng.hpp"

using namespace loadctrl;

TEST_CASE("1D-grid neighborhoods clamp at the edges") {
    const CommGraph g{CommMode::kGrid1d, 10, 2};
    // Agent 5 of 10 (1-based) sees {3..7}; 0-based: agent 4 sees [2, 6].
    CHECK(neighbors(g, 4).first == 2);
    CHECK(neighbors(g, 4).last == 6);
    // First agent's window clamps to {1, 2, 3} (1-based), i.e. [0, 2].
    CHECK(neighbors(g, 0).first == 0);
    CHECK(neighbors(g, 0).last == 2);
    CHECK(neighbors(g, 9).first == 7);
    CHECK(neighbors(g, 9).last == 9);
    CHECK_THROWS_AS(neighbors(g, -1), std::invalid_argument);
    CHECK_THROWS_AS(neighbors(g, 10), std::invalid_argument);

    // n0 >= n - 1 reaches everyone from every seat.
    const CommGraph full{CommMode::kGrid1d, 10, 9};
    for (int i = 0; i < 10; ++i) {
        CHECK(neighbors(full, i).first == 0);
        CHECK(neighbors(full, i).last == 9);
    }

    // Symmetry: j in N(i) iff i in N(j).
    const CommGraph g2{CommMode::kGrid1d, 17, 3};
    for (int i = 0; i < 17; ++i)
        for (int j = 0; j < 17; ++j) {
            const IndexRange ri = neighbors(g2, i);
            const IndexRange rj = neighbors(g2, j);
            const bool j_in_i = j >= ri.first && j <= ri.last;
            const bool i_in_j = i >= rj.first && i <= rj.last;
            CHECK(j_in_i == i_in_j);
        }
}

TEST_CASE("averaging: simple windows and the consensus property") {
    const CommGraph g{CommMode::kGrid1d, 3, 1};
    const std::vector<double> vals{1.0, 2.0, 3.0};
    CHECK(average_neighborhood(g, 1, vals) == doctest::Approx(2.0));
    CHECK(average_neighborhood(g, 0, vals) == doctest::Approx(1.5));
    CHECK(average_neighborhood(g, 2, vals) == doctest::Approx(2.5));

    // Equal inputs stay exactly equal.
    const CommGraph g2{CommMode::kGrid1d, 9, 3};
    const std::vector<double> same(9, 0.7311);
    for (int i = 0; i < 9; ++i)
        CHECK(average_neighborhood(g2, i, same) == 0.7311);
}

TEST_CASE("full graph hands every agent the identical global mean") {
    const CounterRng rng(5);
    const int n = 25;
    std::vector<double> vals(n);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        vals[static_cast<std::size_t>(i)] =
            rng.uniform(Stream::kTest, static_cast<std::uint64_t>(i), 0, -1.0, 1.0);
        mean += vals[static_cast<std::size_t>(i)];
    }
    mean /= n;
    const CommGraph full{CommMode::kGrid1d, n, n - 1};
    const std::vector<double> avg = average_all(full, vals);
    for (int i = 1; i < n; ++i) CHECK(avg[static_cast<std::size_t>(i)] == avg[0]);
    CHECK(avg[0] == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("mode none is the identity transform") {
    const CommGraph g{CommMode::kNone, 5, 3};
    const std::vector<double> vals{5.0, -1.0, 0.25, 9.0, 2.0};
    const std::vector<double> out = average_all(g, vals);
    for (std::size_t i = 0; i < vals.size(); ++i) CHECK(out[i] == vals[i]);
    CHECK(neighbors(g, 3).first == 3);
    CHECK(neighbors(g, 3).last == 3);
}

TEST_CASE("averaging shrinks the spread of independent noise as n0 grows") {
    const CounterRng rng(2024);
    const int n = 400;
    std::vector<double> noise(n);
    for (int i = 0; i < n; ++i)
        noise[static_cast<std::size_t>(i)] =
            rng.gaussian(Stream::kTest, static_cast<std::uint64_t>(i), 0);

    double prev_var = 1e300;
    for (int n0 : {0, 1, 2, 4, 8}) {
        const CommGraph g{n0 == 0 ? CommMode::kNone : CommMode::kGrid1d, n, n0};
        const std::vector<double> avg = average_all(g, noise);
        double mean = 0.0;
        for (double v : avg) mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : avg) var += (v - mean) * (v - mean);
        var /= n - 1;
        CHECK(var < prev_var);
        prev_var = var;
    }
}
