#pragma once

// Built-in benchmark problems.

#include <cmath>
#include <numbers>

#include "cipsl/schemes.hpp"

namespace cipsl {

/// The standard smooth benchmark used by the convergence studies:
///   u(x,t) = sin(2 pi x + 8 t) / 4,   phi_0(x) = exp(sin(4 pi x)),   T = 1.
inline Problem default_benchmark_problem() {
    using std::numbers::pi;
    auto vel_eval = [](double x, double t) {
        const double theta = 2.0 * pi * x + 8.0 * t;
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        return VelocitySample{0.25 * s, 0.5 * pi * c, -pi * pi * s};
    };
    VelocityField vel("quarter-sine", vel_eval, /*has_uxx=*/true);

    Problem p{
        "benchmark",
        std::move(vel),
        [](double x) { return std::exp(std::sin(4.0 * pi * x)); },
        [](double x) {
            return 4.0 * pi * std::cos(4.0 * pi * x) * std::exp(std::sin(4.0 * pi * x));
        },
        [](double x) {
            const double s = std::sin(4.0 * pi * x);
            const double c = std::cos(4.0 * pi * x);
            return 16.0 * pi * pi * (c * c - s) * std::exp(s);
        },
        1.0,
    };
    return p;
}

/// Constant-velocity transport of a given initial profile; handy for
/// translation-exactness and phase tests.
inline Problem constant_advection_problem(double c, std::function<double(double)> value,
                                          std::function<double(double)> deriv,
                                          double horizon = 1.0) {
    return Problem{"constant-advection", VelocityField::constant(c), std::move(value),
                   std::move(deriv), {}, horizon};
}

}  // namespace cipsl
