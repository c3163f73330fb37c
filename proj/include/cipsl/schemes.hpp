#pragma once

// Time-stepping drivers for the 1-D periodic advection equation:
// the CIP scheme (values + derivatives, cubic Hermite closure), the
// semi-Lagrangian schemes with periodic cubic spline and symmetric
// Lagrange interpolation, and the first-order upwind scheme used as a
// phase-error baseline. Every step is linear in the payload. None of
// these schemes is conservative: the mean of F may drift.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cipsl/characteristics.hpp"
#include "cipsl/grid.hpp"
#include "cipsl/interpolation.hpp"

namespace cipsl {

enum class Scheme { cip, spline, lagrange, upwind };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::cip: return "cip";
        case Scheme::spline: return "spline";
        case Scheme::lagrange: return "lagrange";
        case Scheme::upwind: return "upwind";
    }
    return "?";
}

inline Scheme scheme_from_string(const std::string& name) {
    if (name == "cip") return Scheme::cip;
    if (name == "spline") return Scheme::spline;
    if (name == "lagrange") return Scheme::lagrange;
    if (name == "upwind") return Scheme::upwind;
    throw std::invalid_argument("unknown scheme: " + name);
}

/// Advection problem: velocity, initial value with its analytic
/// derivative(s), and the time horizon. initial_deriv2 may be empty;
/// when present it sharpens the reference-solution machinery.
struct Problem {
    std::string name;
    VelocityField velocity;
    std::function<double(double)> initial_value;
    std::function<double(double)> initial_deriv;
    std::function<double(double)> initial_deriv2;  // optional
    double horizon = 1.0;
};

/// Spot-check that initial_deriv is the derivative of initial_value;
/// returns the worst relative central-difference deviation.
inline double validate_problem(const Problem& p, unsigned seed = 2024, int samples = 64) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> xs(0.0, 1.0);
    const double step = 1e-5;
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double x = xs(rng);
        const double fd = (p.initial_value(x + step) - p.initial_value(x - step)) / (2.0 * step);
        const double exact = p.initial_deriv(x);
        const double scale = std::max({std::abs(exact), std::abs(fd), 1e-8});
        worst = std::max(worst, std::abs(fd - exact) / scale);
    }
    return worst;
}

/// Grid data advanced by the schemes. values holds F_j for every scheme;
/// derivs holds G_j and is non-empty only for CIP.
struct SchemeState {
    std::shared_ptr<const PeriodicGrid> grid;
    double time = 0.0;
    std::vector<double> values;
    std::vector<double> derivs;
    double max_ux_dt = 0.0;  // worst step-size diagnostic seen so far
};

/// CIP initialization: F_j = phi_0(x_j), G_j = D phi_0(x_j), t = 0.
inline SchemeState cip_init(const Problem& p, std::shared_ptr<const PeriodicGrid> grid) {
    SchemeState s;
    s.grid = std::move(grid);
    const std::size_t m = s.grid->size();
    s.values.resize(m);
    s.derivs.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        s.values[j] = p.initial_value(s.grid->node(j));
        s.derivs[j] = p.initial_deriv(s.grid->node(j));
    }
    return s;
}

/// Value-only initialization for the spline / Lagrange / upwind schemes.
inline SchemeState nodal_init(const Problem& p, std::shared_ptr<const PeriodicGrid> grid) {
    SchemeState s;
    s.grid = std::move(grid);
    const std::size_t m = s.grid->size();
    s.values.resize(m);
    for (std::size_t j = 0; j < m; ++j) s.values[j] = p.initial_value(s.grid->node(j));
    return s;
}

inline SchemeState init_state(Scheme kind, const Problem& p,
                              std::shared_ptr<const PeriodicGrid> grid) {
    return kind == Scheme::cip ? cip_init(p, std::move(grid)) : nodal_init(p, std::move(grid));
}

/// One CIP step: backtrace the augmented characteristics, then
///   F_j^{n+1} = phi_h(X_{0,j}),  G_j^{n+1} = X_{1,j} * D phi_h(X_{0,j})
/// with phi_h the Hermite interpolant of the current payload.
inline SchemeState cip_step(const SchemeState& state, const VelocityField& vel, double dt) {
    if (state.derivs.size() != state.values.size()) {
        throw std::invalid_argument("cip_step: state carries no derivative payload");
    }
    const HermiteFn phi(state.grid, state.values, state.derivs);
    const CharMap cm = rk3_backtrace(vel, *state.grid, state.time + dt, dt);

    SchemeState next;
    next.grid = state.grid;
    next.time = state.time + dt;
    next.max_ux_dt = std::max(state.max_ux_dt, cm.max_ux_dt);
    const std::size_t m = state.grid->size();
    next.values.resize(m);
    next.derivs.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto [val, der] = phi.eval_with_deriv(cm.foot[j]);
        next.values[j] = val;
        next.derivs[j] = cm.foot_deriv[j] * der;
    }
    return next;
}

/// One spline semi-Lagrangian step: F_j^{n+1} = phi_h(X_{0,j}) with phi_h
/// the periodic cubic spline through the current values.
inline SchemeState spline_sl_step(const SchemeState& state, const VelocityField& vel,
                                  double dt) {
    const SplineFn phi(state.grid, state.values);
    const CharMap cm = rk3_backtrace(vel, *state.grid, state.time + dt, dt);

    SchemeState next;
    next.grid = state.grid;
    next.time = state.time + dt;
    next.max_ux_dt = std::max(state.max_ux_dt, cm.max_ux_dt);
    const std::size_t m = state.grid->size();
    next.values.resize(m);
    for (std::size_t j = 0; j < m; ++j) next.values[j] = phi.eval(cm.foot[j]);
    return next;
}

/// One semi-Lagrangian step with the symmetric Lagrange stencil.
inline SchemeState lagrange_sl_step(const SchemeState& state, const VelocityField& vel,
                                    double dt) {
    const LagrangeFn phi(state.grid, state.values);
    const CharMap cm = rk3_backtrace(vel, *state.grid, state.time + dt, dt);

    SchemeState next;
    next.grid = state.grid;
    next.time = state.time + dt;
    next.max_ux_dt = std::max(state.max_ux_dt, cm.max_ux_dt);
    const std::size_t m = state.grid->size();
    next.values.resize(m);
    for (std::size_t j = 0; j < m; ++j) next.values[j] = phi.eval(cm.foot[j]);
    return next;
}

/// First-order upwind step for constant velocity on a uniform grid;
/// requires the CFL number mu = |u| dt / h to lie in [0,1].
inline SchemeState upwind_step(const SchemeState& state, double u_const, double dt) {
    if (!state.grid->is_uniform()) {
        throw std::invalid_argument("upwind_step: requires a uniform grid");
    }
    const double h = state.grid->width(0);
    const double mu = std::abs(u_const) * dt / h;
    if (mu > 1.0 + 1e-12) {
        throw std::invalid_argument("upwind_step: CFL number exceeds 1");
    }

    SchemeState next;
    next.grid = state.grid;
    next.time = state.time + dt;
    next.max_ux_dt = state.max_ux_dt;
    const std::size_t m = state.grid->size();
    next.values.resize(m);
    if (u_const >= 0.0) {
        for (std::size_t j = 0; j < m; ++j) {
            next.values[j] = (1.0 - mu) * state.values[j] + mu * state.values[(j + m - 1) % m];
        }
    } else {
        for (std::size_t j = 0; j < m; ++j) {
            next.values[j] = (1.0 - mu) * state.values[j] + mu * state.values[(j + 1) % m];
        }
    }
    return next;
}

inline SchemeState step(Scheme kind, const SchemeState& state, const VelocityField& vel,
                        double dt) {
    switch (kind) {
        case Scheme::cip: return cip_step(state, vel, dt);
        case Scheme::spline: return spline_sl_step(state, vel, dt);
        case Scheme::lagrange: return lagrange_sl_step(state, vel, dt);
        case Scheme::upwind: {
            const auto c = vel.constant_value();
            if (!c) {
                throw std::invalid_argument("upwind scheme requires a constant velocity");
            }
            return upwind_step(state, *c, dt);
        }
    }
    throw std::logic_error("step: unknown scheme");
}

/// Advance the problem over [0, horizon] in N uniform steps. The state
/// time is snapped to horizon * n / N each step, so the final time equals
/// the horizon to within one rounding.
inline SchemeState run(Scheme kind, const Problem& p, std::shared_ptr<const PeriodicGrid> grid,
                       std::size_t n_steps) {
    if (n_steps < 1) throw std::invalid_argument("run: need at least one step");
    const double dt = p.horizon / static_cast<double>(n_steps);
    SchemeState state = init_state(kind, p, std::move(grid));
    for (std::size_t n = 0; n < n_steps; ++n) {
        state = step(kind, state, p.velocity, dt);
        state.time = p.horizon * static_cast<double>(n + 1) / static_cast<double>(n_steps);
    }
    return state;
}

}  // namespace cipsl
