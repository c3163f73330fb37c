#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "cipsl/problems.hpp"
#include "cipsl/schemes.hpp"
#include "test_support.hpp"

using namespace cipsl;
using Catch::Matchers::WithinAbs;
using std::numbers::pi;

namespace {

std::shared_ptr<const PeriodicGrid> make_grid(std::size_t m) {
    return std::make_shared<const PeriodicGrid>(PeriodicGrid::uniform(m));
}

SchemeState random_state(std::shared_ptr<const PeriodicGrid> grid, bool with_derivs,
                         unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    SchemeState s;
    s.grid = std::move(grid);
    s.values.resize(s.grid->size());
    for (auto& v : s.values) v = dist(rng);
    if (with_derivs) {
        s.derivs.resize(s.grid->size());
        for (auto& v : s.derivs) v = dist(rng);
    }
    return s;
}

}  // namespace

TEST_CASE("cip initialization", "[schemes]") {
    const auto p = default_benchmark_problem();
    REQUIRE(validate_problem(p) <= 1e-6);

    auto s = cip_init(p, make_grid(80));
    REQUIRE(s.time == 0.0);
    REQUIRE_THAT(s.values[0], WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(s.derivs[0], WithinAbs(4.0 * pi, 1e-12));

    const Problem constant{"c", VelocityField::constant(0.0),
                           [](double) { return 2.5; }, [](double) { return 0.0; }, {}, 1.0};
    s = cip_init(constant, make_grid(8));
    for (double v : s.values) REQUIRE(v == 2.5);
    for (double g : s.derivs) REQUIRE(g == 0.0);

    const Problem sine{"s", VelocityField::constant(0.0),
                       [](double x) { return std::sin(2.0 * pi * x); },
                       [](double x) { return 2.0 * pi * std::cos(2.0 * pi * x); }, {}, 1.0};
    s = cip_init(sine, make_grid(4));
    const double expect_f[4] = {0.0, 1.0, 0.0, -1.0};
    const double expect_g[4] = {2.0 * pi, 0.0, -2.0 * pi, 0.0};
    for (int j = 0; j < 4; ++j) {
        REQUIRE_THAT(s.values[j], WithinAbs(expect_f[j], 1e-15));
        REQUIRE_THAT(s.derivs[j], WithinAbs(expect_g[j], 4e-15));
    }
}

TEST_CASE("zero velocity leaves states unchanged", "[schemes]") {
    const auto grid = make_grid(16);
    const auto zero = VelocityField::constant(0.0);
    const double dt = 0.125;

    const auto cip0 = random_state(grid, true, 1);
    const auto cip1 = cip_step(cip0, zero, dt);
    for (std::size_t j = 0; j < 16; ++j) {
        REQUIRE(cip1.values[j] == cip0.values[j]);
        REQUIRE(cip1.derivs[j] == cip0.derivs[j]);
    }

    const auto sl0 = random_state(grid, false, 2);
    for (auto* stepper : {&spline_sl_step, &lagrange_sl_step}) {
        const auto out = (*stepper)(sl0, zero, dt);
        for (std::size_t j = 0; j < 16; ++j) REQUIRE(out.values[j] == sl0.values[j]);
    }
    const auto up = upwind_step(sl0, 0.0, dt);
    for (std::size_t j = 0; j < 16; ++j) REQUIRE(up.values[j] == sl0.values[j]);
}

TEST_CASE("integer grid shifts are exact", "[schemes]") {
    // M a power of two and c*dt a whole number of cells: all arithmetic exact
    const auto grid = make_grid(32);
    const double dt = 0.25, c = 0.5;  // shift = c*dt = 4 cells
    const std::size_t shift = 4;
    const auto vel = VelocityField::constant(c);

    const auto cip0 = random_state(grid, true, 3);
    const auto cip1 = cip_step(cip0, vel, dt);
    const auto sl0 = random_state(grid, false, 4);
    const auto spl1 = spline_sl_step(sl0, vel, dt);
    const auto lag1 = lagrange_sl_step(sl0, vel, dt);
    const auto up1 = upwind_step(sl0, 0.125, dt);  // mu = 1: one-cell shift

    for (std::size_t j = 0; j < 32; ++j) {
        const std::size_t src = (j + 32 - shift) % 32;
        REQUIRE_THAT(cip1.values[j], WithinAbs(cip0.values[src], 1e-13));
        REQUIRE_THAT(cip1.derivs[j], WithinAbs(cip0.derivs[src], 1e-13));
        REQUIRE_THAT(spl1.values[j], WithinAbs(sl0.values[src], 1e-13));
        REQUIRE_THAT(lag1.values[j], WithinAbs(sl0.values[src], 1e-13));
        REQUIRE(up1.values[j] == sl0.values[(j + 31) % 32]);
    }
}

TEST_CASE("steps are linear in the payload", "[schemes]") {
    const auto grid = make_grid(20);
    const auto vel = default_benchmark_problem().velocity;
    const double dt = 1.0 / 40.0, alpha = 0.7, beta = -1.3;

    SECTION("cip") {
        const auto a = random_state(grid, true, 5);
        const auto b = random_state(grid, true, 6);
        SchemeState mix = a;
        for (std::size_t j = 0; j < 20; ++j) {
            mix.values[j] = alpha * a.values[j] + beta * b.values[j];
            mix.derivs[j] = alpha * a.derivs[j] + beta * b.derivs[j];
        }
        const auto sa = cip_step(a, vel, dt);
        const auto sb = cip_step(b, vel, dt);
        const auto sm = cip_step(mix, vel, dt);
        for (std::size_t j = 0; j < 20; ++j) {
            REQUIRE_THAT(sm.values[j],
                         WithinAbs(alpha * sa.values[j] + beta * sb.values[j], 1e-12));
            REQUIRE_THAT(sm.derivs[j],
                         WithinAbs(alpha * sa.derivs[j] + beta * sb.derivs[j], 1e-12));
        }
    }

    SECTION("value-payload schemes") {
        const auto a = random_state(grid, false, 7);
        const auto b = random_state(grid, false, 8);
        SchemeState mix = a;
        for (std::size_t j = 0; j < 20; ++j) {
            mix.values[j] = alpha * a.values[j] + beta * b.values[j];
        }
        for (auto* stepper : {&spline_sl_step, &lagrange_sl_step}) {
            const auto sa = (*stepper)(a, vel, dt);
            const auto sb = (*stepper)(b, vel, dt);
            const auto sm = (*stepper)(mix, vel, dt);
            for (std::size_t j = 0; j < 20; ++j) {
                REQUIRE_THAT(sm.values[j],
                             WithinAbs(alpha * sa.values[j] + beta * sb.values[j], 1e-12));
            }
        }
        const auto ua = upwind_step(a, 1.0, dt);
        const auto ub = upwind_step(b, 1.0, dt);
        const auto um = upwind_step(mix, 1.0, dt);
        for (std::size_t j = 0; j < 20; ++j) {
            REQUIRE_THAT(um.values[j],
                         WithinAbs(alpha * ua.values[j] + beta * ub.values[j], 1e-12));
        }
    }
}

TEST_CASE("upwind preconditions", "[schemes]") {
    const auto grid = make_grid(16);
    const auto s = random_state(grid, false, 9);
    REQUIRE_THROWS_AS(upwind_step(s, 1.0, 1.0), std::invalid_argument);  // CFL > 1

    SchemeState nu;
    nu.grid = std::make_shared<const PeriodicGrid>(testing::jittered_grid(8));
    nu.values.assign(8, 1.0);
    REQUIRE_THROWS_AS(upwind_step(nu, 0.1, 0.01), std::invalid_argument);

    // negative velocity mirrors the stencil
    const double dt = 0.5, c = -0.0625;  // mu = 0.5
    const auto out = upwind_step(s, c, dt);
    for (std::size_t j = 0; j < 16; ++j) {
        REQUIRE(out.values[j] == 0.5 * s.values[j] + 0.5 * s.values[(j + 1) % 16]);
    }
}

TEST_CASE("upwind amplification factor", "[schemes]") {
    const std::size_t m = 40;
    const auto grid = make_grid(m);
    const double mu = 0.4, h = 1.0 / 40.0, dt = mu * h;
    const long k = 7;

    SchemeState re, im;
    re.grid = grid;
    im.grid = grid;
    re.values.resize(m);
    im.values.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        re.values[j] = std::cos(2.0 * pi * k * grid->node(j));
        im.values[j] = std::sin(2.0 * pi * k * grid->node(j));
    }
    const auto re1 = upwind_step(re, 1.0, dt);
    const auto im1 = upwind_step(im, 1.0, dt);

    // direct DFT of one step vs the closed-form symbol
    const std::complex<double> expected =
        1.0 - mu + mu * std::polar(1.0, -2.0 * pi * k * h);
    for (std::size_t j = 0; j < m; ++j) {
        const std::complex<double> in = {re.values[j], im.values[j]};
        const std::complex<double> out = {re1.values[j], im1.values[j]};
        REQUIRE_THAT(std::abs(out - expected * in), WithinAbs(0.0, 1e-13));
    }
}

TEST_CASE("run drives N uniform steps", "[schemes]") {
    const auto p = default_benchmark_problem();
    const auto grid = make_grid(16);

    const auto one = run(Scheme::cip, p, grid, 1);
    auto manual = cip_init(p, grid);
    manual = cip_step(manual, p.velocity, p.horizon);
    REQUIRE(one.time == p.horizon);
    for (std::size_t j = 0; j < 16; ++j) {
        REQUIRE(one.values[j] == manual.values[j]);
        REQUIRE(one.derivs[j] == manual.derivs[j]);
    }

    const auto many = run(Scheme::spline, p, grid, 7);
    REQUIRE(std::abs(many.time - p.horizon) <= 1e-12);

    REQUIRE_THROWS_AS(run(Scheme::upwind, p, grid, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(run(Scheme::cip, p, grid, 0), std::invalid_argument);
}

TEST_CASE("scheme names round-trip", "[schemes]") {
    for (auto s : {Scheme::cip, Scheme::spline, Scheme::lagrange, Scheme::upwind}) {
        REQUIRE(scheme_from_string(to_string(s)) == s);
    }
    REQUIRE_THROWS_AS(scheme_from_string("weno"), std::invalid_argument);
}
