#pragma once

// Characteristic backtracing for the 1-D periodic advection equation.
//
// rk3_backtrace advances the augmented pair (X, X_x) one step backward
// with the three-stage Runge-Kutta update used by the schemes; the
// reference tracer integrates the characteristic ODE with classical RK4
// under Richardson step-halving control and serves as the "exact
// solution" oracle.
//
// Velocity fields must be 1-periodic in x and defined for all real x;
// the tracers work in unwrapped coordinates and wrap only returned feet.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cipsl/grid.hpp"

namespace cipsl {

struct VelocitySample {
    double u = 0.0;
    double ux = 0.0;
    double uxx = 0.0;  // valid only when the field advertises it
};

/// Analytic velocity field u(x,t) with its spatial derivatives, evaluated
/// through one fused call so trigonometric work can be shared.
class VelocityField {
public:
    enum class Smoothness { analytic, c3, c2 };

    using Fused = std::function<VelocitySample(double x, double t)>;

    VelocityField(std::string name, Fused eval, bool has_uxx,
                  Smoothness smoothness = Smoothness::analytic)
        : name_(std::move(name)), eval_(std::move(eval)), has_uxx_(has_uxx),
          smoothness_(smoothness) {}

    static VelocityField constant(double c) {
        VelocityField v("constant", [c](double, double) { return VelocitySample{c, 0.0, 0.0}; },
                        true);
        v.constant_value_ = c;
        return v;
    }

    static VelocityField from_parts(std::string name, std::function<double(double, double)> u,
                                    std::function<double(double, double)> ux,
                                    std::function<double(double, double)> uxx = {},
                                    Smoothness smoothness = Smoothness::analytic) {
        const bool has2 = static_cast<bool>(uxx);
        auto fused = [u = std::move(u), ux = std::move(ux), uxx = std::move(uxx),
                      has2](double x, double t) {
            return VelocitySample{u(x, t), ux(x, t), has2 ? uxx(x, t) : 0.0};
        };
        return VelocityField(std::move(name), std::move(fused), has2, smoothness);
    }

    VelocitySample sample(double x, double t) const { return eval_(x, t); }
    double u(double x, double t) const { return eval_(x, t).u; }
    double ux(double x, double t) const { return eval_(x, t).ux; }
    double uxx(double x, double t) const {
        if (!has_uxx_) throw std::logic_error("VelocityField: u_xx not provided");
        return eval_(x, t).uxx;
    }

    bool has_uxx() const { return has_uxx_; }
    const std::string& name() const { return name_; }
    Smoothness smoothness() const { return smoothness_; }
    std::optional<double> constant_value() const { return constant_value_; }

    /// Spot-check that ux matches a central difference of u at random
    /// points; returns the worst relative deviation.
    double validate(double t_max, unsigned seed = 2024, int samples = 64) const {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> ux_dist(0.0, 1.0);
        std::uniform_real_distribution<double> t_dist(0.0, t_max);
        const double step = 1e-5;
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double x = ux_dist(rng);
            const double t = t_dist(rng);
            const double fd = (u(x + step, t) - u(x - step, t)) / (2.0 * step);
            const double exact = ux(x, t);
            const double scale = std::max({std::abs(exact), std::abs(fd), 1e-8});
            worst = std::max(worst, std::abs(fd - exact) / scale);
        }
        return worst;
    }

private:
    std::string name_;
    Fused eval_;
    bool has_uxx_;
    Smoothness smoothness_;
    std::optional<double> constant_value_;
};

/// Backtraced characteristic feet X_{0,j} and their spatial derivatives
/// X_{1,j} at the grid nodes, for one time step.
struct CharMap {
    std::vector<double> foot;
    std::vector<double> foot_deriv;
    /// max over stage evaluations of |u_x| * dt; values above 1/2 leave
    /// the small-step regime the derivative bounds assume.
    double max_ux_dt = 0.0;
};

/// One backward step of the three-stage Runge-Kutta tracer applied to the
/// augmented field (u, y1 * u_x), from t_next down to t_next - dt:
///   k1 = u(y, t_next)
///   k2 = u(y - dt/2 k1, t_next - dt/2)
///   k3 = u(y - dt (-k1 + 2 k2), t_next - dt)
///   X  = y - dt (k1 + 4 k2 + k3) / 6,   y = (x_j, 1).
inline CharMap rk3_backtrace(const VelocityField& vel, const PeriodicGrid& grid, double t_next,
                             double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk3_backtrace: dt must be positive");
    const std::size_t m = grid.size();
    CharMap out;
    out.foot.resize(m);
    out.foot_deriv.resize(m);
    double max_ux = 0.0;

    for (std::size_t j = 0; j < m; ++j) {
        const double x = grid.node(j);

        const VelocitySample s1 = vel.sample(x, t_next);
        const double k1x = s1.u;
        const double k1d = 1.0 * s1.ux;

        const VelocitySample s2 = vel.sample(x - 0.5 * dt * k1x, t_next - 0.5 * dt);
        const double k2x = s2.u;
        const double k2d = (1.0 - 0.5 * dt * k1d) * s2.ux;

        const VelocitySample s3 =
            vel.sample(x - dt * (-k1x + 2.0 * k2x), t_next - dt);
        const double k3x = s3.u;
        const double k3d = (1.0 - dt * (-k1d + 2.0 * k2d)) * s3.ux;

        out.foot[j] = wrap(x - dt * (k1x + 4.0 * k2x + k3x) / 6.0);
        out.foot_deriv[j] = 1.0 - dt * (k1d + 4.0 * k2d + k3d) / 6.0;

        max_ux = std::max({max_ux, std::abs(s1.ux), std::abs(s2.ux), std::abs(s3.ux)});
    }
    out.max_ux_dt = max_ux * dt;
    return out;
}

struct BacktraceResult {
    double foot = 0.0;        // xi(t_to; x, t_from), wrapped to [0,1)
    double foot_deriv = 1.0;  // xi_x
};

struct BacktraceResult2 {
    double foot = 0.0;
    double foot_deriv = 1.0;
    double foot_deriv2 = 0.0;  // xi_xx
};

namespace detail {

template <std::size_t N, class Rhs>
std::array<double, N> rk4_fixed(Rhs&& rhs, std::array<double, N> y, double t0, double t1,
                                long steps) {
    const double dt = (t1 - t0) / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
        const double t = t0 + dt * static_cast<double>(i);
        const auto k1 = rhs(y, t);
        std::array<double, N> y2;
        for (std::size_t c = 0; c < N; ++c) y2[c] = y[c] + 0.5 * dt * k1[c];
        const auto k2 = rhs(y2, t + 0.5 * dt);
        for (std::size_t c = 0; c < N; ++c) y2[c] = y[c] + 0.5 * dt * k2[c];
        const auto k3 = rhs(y2, t + 0.5 * dt);
        for (std::size_t c = 0; c < N; ++c) y2[c] = y[c] + dt * k3[c];
        const auto k4 = rhs(y2, t + dt);
        for (std::size_t c = 0; c < N; ++c) {
            y[c] += dt * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) / 6.0;
        }
    }
    return y;
}

/// RK4 with step halving until successive answers differ by less than tol
/// in every component; returns the Richardson-extrapolated pair.
template <std::size_t N, class Rhs>
std::array<double, N> rk4_adaptive(Rhs&& rhs, const std::array<double, N>& y0, double t0,
                                   double t1, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("reference backtrace: tol must be positive");
    if (t0 == t1) return y0;
    constexpr long max_steps = 1L << 24;
    long steps = 16;
    auto coarse = rk4_fixed<N>(rhs, y0, t0, t1, steps);
    while (true) {
        steps *= 2;
        if (steps > max_steps) {
            throw std::runtime_error("reference backtrace: tolerance unreachable within step cap");
        }
        const auto fine = rk4_fixed<N>(rhs, y0, t0, t1, steps);
        double diff = 0.0;
        for (std::size_t c = 0; c < N; ++c) diff = std::max(diff, std::abs(fine[c] - coarse[c]));
        if (diff < tol) {
            std::array<double, N> out;
            for (std::size_t c = 0; c < N; ++c) {
                out[c] = fine[c] + (fine[c] - coarse[c]) / 15.0;
            }
            return out;
        }
        coarse = fine;
    }
}

}  // namespace detail

/// High-accuracy integration of the characteristic pair
///   d/ds xi = u(xi, s),   d/ds xi_x = u_x(xi, s) xi_x
/// from s = t_from to s = t_to (either direction).
inline BacktraceResult reference_backtrace(const VelocityField& vel, double x, double t_from,
                                           double t_to, double tol = 1e-12) {
    const auto rhs = [&](const std::array<double, 2>& y, double s) {
        const VelocitySample v = vel.sample(y[0], s);
        return std::array<double, 2>{v.u, y[1] * v.ux};
    };
    const auto y = detail::rk4_adaptive<2>(rhs, {x, 1.0}, t_from, t_to, tol);
    return BacktraceResult{wrap(y[0]), y[1]};
}

/// As above but also carries xi_xx (requires u_xx):
///   d/ds xi_xx = u_xx(xi, s) xi_x^2 + u_x(xi, s) xi_xx.
inline BacktraceResult2 reference_backtrace2(const VelocityField& vel, double x, double t_from,
                                             double t_to, double tol = 1e-12) {
    if (!vel.has_uxx()) {
        throw std::logic_error("reference_backtrace2: velocity lacks u_xx");
    }
    const auto rhs = [&](const std::array<double, 3>& y, double s) {
        const VelocitySample v = vel.sample(y[0], s);
        return std::array<double, 3>{v.u, y[1] * v.ux, y[1] * y[1] * v.uxx + y[2] * v.ux};
    };
    const auto y = detail::rk4_adaptive<3>(rhs, {x, 1.0, 0.0}, t_from, t_to, tol);
    return BacktraceResult2{wrap(y[0]), y[1], y[2]};
}

}  // namespace cipsl
