#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cipsl/grid.hpp"
#include "test_support.hpp"

using namespace cipsl;
using Catch::Matchers::WithinAbs;

TEST_CASE("uniform grid construction", "[grid]") {
    const auto g = PeriodicGrid::uniform(4);
    REQUIRE(g.size() == 4);
    REQUIRE(g.node(0) == 0.0);
    REQUIRE(g.node(1) == 0.25);
    REQUIRE(g.node(2) == 0.5);
    REQUIRE(g.node(3) == 0.75);
    for (std::size_t j = 0; j < 4; ++j) REQUIRE(g.width(j) == 0.25);
    REQUIRE(g.is_uniform());

    REQUIRE(PeriodicGrid::uniform(80).h_max() == 1.0 / 80.0);
    REQUIRE_THROWS_AS(PeriodicGrid::uniform(3), std::invalid_argument);
}

TEST_CASE("wrap maps onto [0,1)", "[grid]") {
    REQUIRE(wrap(1.25) == 0.25);
    REQUIRE_THAT(wrap(-0.1), WithinAbs(0.9, 1e-15));
    REQUIRE(wrap(0.0) == 0.0);
    REQUIRE(wrap(-1e-18) < 1.0);
    REQUIRE(wrap(17.0) == 0.0);
    REQUIRE_THROWS_AS(wrap(std::numeric_limits<double>::infinity()), std::invalid_argument);
    REQUIRE_THROWS_AS(wrap(std::nan("")), std::invalid_argument);
}

TEST_CASE("locate finds the enclosing cell", "[grid]") {
    const auto g = PeriodicGrid::uniform(4);
    REQUIRE(g.locate(0.3) == 1);
    REQUIRE(g.locate(0.9999) == 3);
    REQUIRE(g.locate(1.0) == 0);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> xs(-3.0, 3.0);
    const auto nu = testing::jittered_grid(11);
    for (int i = 0; i < 500; ++i) {
        const double x = xs(rng);
        for (const auto& grid : {g, nu}) {
            const std::size_t j = grid.locate(x);
            const double w = wrap(x);
            REQUIRE(j < grid.size());
            REQUIRE(grid.node(j) <= w);
            REQUIRE(w < grid.cell_right(j));
            // stable under integer translation
            REQUIRE(grid.locate(x + 2.0) == j);
        }
    }
}

TEST_CASE("node validation", "[grid]") {
    REQUIRE_THROWS_AS(PeriodicGrid::from_nodes({0.0, 0.5, 0.25, 0.75}), std::invalid_argument);
    REQUIRE_THROWS_AS(PeriodicGrid::from_nodes({0.1, 0.2, 0.5, 0.75}), std::invalid_argument);
    REQUIRE_THROWS_AS(PeriodicGrid::from_nodes({0.0, 0.25, 0.5, 1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(PeriodicGrid::from_nodes({0.0, 0.3, 0.7}), std::invalid_argument);

    const auto g = PeriodicGrid::from_nodes({0.0, 0.1, 0.5, 0.75});
    REQUIRE_FALSE(g.is_uniform());
    REQUIRE(g.width(3) == 0.25);
    REQUIRE(g.h_max() == 0.4);

    // explicit uniform nodes are detected as uniform
    const auto u = PeriodicGrid::from_nodes({0.0, 0.25, 0.5, 0.75});
    REQUIRE(u.is_uniform());

    // widths cover the circle even at large M
    const auto big = PeriodicGrid::uniform(10000);
    REQUIRE(big.size() == 10000);
}
