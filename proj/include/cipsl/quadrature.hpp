#pragma once

// Gauss-Legendre quadrature on cells of a periodic grid, plus a
// deterministic pairwise summation used by all norm computations.

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "cipsl/grid.hpp"

namespace cipsl {

/// Sum with pairwise splitting; bit-stable and O(eps log n) accurate.
inline double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration
/// on the Legendre polynomial (accurate to ~1e-15 for n <= 64).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussRule(std::size_t n) : nodes(n), weights(n) {
        if (n == 0 || n > 64) {
            throw std::invalid_argument("GaussRule: order must be in [1,64]");
        }
        for (std::size_t i = 0; i < n; ++i) {
            // Chebyshev initial guess for the i-th root
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (std::size_t k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

/// Integrate f over one interval [a,b] with an n-point Gauss rule.
template <class F>
double gauss_integrate(F&& f, double a, double b, const GaussRule& rule) {
    const double mid = 0.5 * (a + b);
    const double hal = 0.5 * (b - a);
    std::vector<double> terms(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        terms[i] = rule.weights[i] * f(mid + hal * rule.nodes[i]);
    }
    return hal * pairwise_sum(terms);
}

/// Integrate f over the whole circle, cell by cell. Exact for piecewise
/// polynomials of degree <= 2n-1 on the grid cells.
template <class F>
double integrate_cells(const PeriodicGrid& grid, F&& f, std::size_t points_per_cell = 8) {
    const GaussRule rule(points_per_cell);
    std::vector<double> cells(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        cells[j] = gauss_integrate(f, grid.node(j), grid.node(j) + grid.width(j), rule);
    }
    return pairwise_sum(cells);
}

/// L2 norm over the circle via per-cell Gauss quadrature.
template <class F>
double l2_norm_cells(const PeriodicGrid& grid, F&& f, std::size_t points_per_cell = 8) {
    const double sq = integrate_cells(
        grid, [&](double x) { const double v = f(x); return v * v; }, points_per_cell);
    return std::sqrt(std::max(sq, 0.0));
}

}  // namespace cipsl
