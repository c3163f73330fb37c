#pragma once

// Piecewise-cubic interpolation operators on a periodic grid:
//
//   HermiteFn   C1 cubic matching prescribed values and first derivatives
//               at the nodes (the operator behind the CIP scheme).
//   SplineFn    C2 periodic cubic spline matching prescribed values; the
//               node derivatives solve a cyclic tridiagonal system and the
//               result is stored in Hermite form so all three evaluators
//               share one kernel.
//   LagrangeFn  symmetric 4-point cubic Lagrange stencil, uniform grids.
//
// Second derivatives are piecewise linear and double-valued at the nodes;
// all evaluators take the right limit there.

#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cipsl/grid.hpp"
#include "cipsl/quadrature.hpp"

namespace cipsl {

namespace detail {

struct CellCubic {
    double f0, f1;  // endpoint values
    double g0, g1;  // endpoint derivatives
    double h;       // cell width

    // written as f0 plus increments so constants and node queries come out exact
    double eval(double s) const {
        const double u = 1.0 - s;
        return f0 + s * s * (3.0 - 2.0 * s) * (f1 - f0) + h * s * u * u * g0 +
               h * s * s * (s - 1.0) * g1;
    }
    double deriv(double s) const {
        return 6.0 * s * (s - 1.0) * (f0 - f1) / h + g0 * (3.0 * s - 1.0) * (s - 1.0) +
               g1 * s * (3.0 * s - 2.0);
    }
    double deriv2(double s) const {
        return (12.0 * s - 6.0) * (f0 - f1) / (h * h) + g0 * (6.0 * s - 4.0) / h +
               g1 * (6.0 * s - 2.0) / h;
    }
};

}  // namespace detail

/// C1 piecewise cubic determined by per-node values and first derivatives.
/// Interpolates exactly at nodes: eval(x_j) == values[j], eval_deriv(x_j)
/// == derivs[j].
class HermiteFn {
public:
    HermiteFn(std::shared_ptr<const PeriodicGrid> grid, std::vector<double> values,
              std::vector<double> derivs)
        : grid_(std::move(grid)), values_(std::move(values)), derivs_(std::move(derivs)) {
        if (!grid_) throw std::invalid_argument("HermiteFn: null grid");
        if (values_.size() != grid_->size() || derivs_.size() != grid_->size()) {
            throw std::invalid_argument("HermiteFn: values/derivs length must equal grid size");
        }
    }
    HermiteFn(const PeriodicGrid& grid, std::vector<double> values, std::vector<double> derivs)
        : HermiteFn(std::make_shared<PeriodicGrid>(grid), std::move(values), std::move(derivs)) {}

    double eval(double x) const {
        const auto [cell, s] = cell_at(x);
        return cell.eval(s);
    }
    double eval_deriv(double x) const {
        const auto [cell, s] = cell_at(x);
        return cell.deriv(s);
    }
    double eval_deriv2(double x) const {
        const auto [cell, s] = cell_at(x);
        return cell.deriv2(s);
    }
    /// Value and first derivative with a single cell lookup.
    std::pair<double, double> eval_with_deriv(double x) const {
        const auto [cell, s] = cell_at(x);
        return {cell.eval(s), cell.deriv(s)};
    }

    const PeriodicGrid& grid() const { return *grid_; }
    std::shared_ptr<const PeriodicGrid> grid_ptr() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<const double> derivs() const { return derivs_; }

private:
    std::pair<detail::CellCubic, double> cell_at(double x) const {
        const double w = wrap(x);
        const std::size_t j = grid_->locate(w);
        const std::size_t jn = j + 1 < grid_->size() ? j + 1 : 0;
        const double h = grid_->width(j);
        const double s = (w - grid_->node(j)) / h;
        return {detail::CellCubic{values_[j], values_[jn], derivs_[j], derivs_[jn], h}, s};
    }

    std::shared_ptr<const PeriodicGrid> grid_;
    std::vector<double> values_;
    std::vector<double> derivs_;
};

/// hermite_interpolate: the interpolation operator as a free function.
inline HermiteFn hermite_interpolate(std::shared_ptr<const PeriodicGrid> grid,
                                     std::vector<double> values, std::vector<double> derivs) {
    return HermiteFn(std::move(grid), std::move(values), std::move(derivs));
}
inline HermiteFn hermite_interpolate(const PeriodicGrid& grid, std::vector<double> values,
                                     std::vector<double> derivs) {
    return HermiteFn(grid, std::move(values), std::move(derivs));
}

namespace detail {

/// Thomas solve of a tridiagonal system. sub[j] multiplies x[j-1] in row j
/// (sub[0] unused), super[j] multiplies x[j+1] (super[n-1] unused).
inline std::vector<double> solve_tridiagonal(std::span<const double> sub,
                                             std::span<const double> diag,
                                             std::span<const double> super,
                                             std::span<const double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> cp(n, 0.0), x(n, 0.0);
    double m = diag[0];
    cp[0] = super[0] / m;
    x[0] = rhs[0] / m;
    for (std::size_t j = 1; j < n; ++j) {
        m = diag[j] - sub[j] * cp[j - 1];
        if (m == 0.0) throw std::runtime_error("solve_tridiagonal: singular system");
        cp[j] = (j + 1 < n ? super[j] : 0.0) / m;
        x[j] = (rhs[j] - sub[j] * x[j - 1]) / m;
    }
    for (std::size_t j = n - 1; j-- > 0;) x[j] -= cp[j] * x[j + 1];
    return x;
}

/// Cyclic tridiagonal solve via Sherman-Morrison: the corner entries
/// (row 0 <- x[n-1] from sub[0], row n-1 <- x[0] from super[n-1]) are
/// removed by a rank-one update, leaving two plain Thomas solves.
inline std::vector<double> solve_cyclic_tridiagonal(std::span<const double> sub,
                                                    std::span<const double> diag,
                                                    std::span<const double> super,
                                                    std::span<const double> rhs) {
    const std::size_t n = diag.size();
    const double alpha = sub[0];        // row 0, column n-1
    const double beta = super[n - 1];   // row n-1, column 0
    const double gamma = -diag[0];

    std::vector<double> d(diag.begin(), diag.end());
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;

    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = beta;

    const auto y = solve_tridiagonal(sub, d, super, rhs);
    const auto z = solve_tridiagonal(sub, d, super, u);

    const double vy = y[0] + alpha / gamma * y[n - 1];
    const double vz = z[0] + alpha / gamma * z[n - 1];
    const double factor = vy / (1.0 + vz);

    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = y[j] - factor * z[j];
    return x;
}

/// Node derivatives of the C2 periodic cubic spline through the values:
/// continuity of the second derivative at every node gives, per row j,
///   m_{j-1}/h_{j-1} + 2(1/h_{j-1}+1/h_j) m_j + m_{j+1}/h_j
///     = 3 [ (F_{j+1}-F_j)/h_j^2 + (F_j-F_{j-1})/h_{j-1}^2 ].
inline std::vector<double> periodic_spline_derivs(const PeriodicGrid& grid,
                                                  std::span<const double> values) {
    const std::size_t n = grid.size();
    std::vector<double> sub(n), diag(n), super(n), rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double hm = grid.width((j + n - 1) % n);
        const double hp = grid.width(j);
        const double fp = values[(j + 1) % n];
        const double f0 = values[j];
        const double fm = values[(j + n - 1) % n];
        sub[j] = 1.0 / hm;
        super[j] = 1.0 / hp;
        diag[j] = 2.0 * (sub[j] + super[j]);
        rhs[j] = 3.0 * ((fp - f0) / (hp * hp) + (f0 - fm) / (hm * hm));
    }
    return solve_cyclic_tridiagonal(sub, diag, super, rhs);
}

}  // namespace detail

/// C2 periodic cubic spline determined by per-node values, stored in
/// Hermite form with the solved node derivatives.
class SplineFn {
public:
    SplineFn(std::shared_ptr<const PeriodicGrid> grid, std::vector<double> values)
        : inner_(make_inner(std::move(grid), std::move(values))) {}
    SplineFn(const PeriodicGrid& grid, std::vector<double> values)
        : SplineFn(std::make_shared<PeriodicGrid>(grid), std::move(values)) {}

    double eval(double x) const { return inner_.eval(x); }
    double eval_deriv(double x) const { return inner_.eval_deriv(x); }
    double eval_deriv2(double x) const { return inner_.eval_deriv2(x); }

    const PeriodicGrid& grid() const { return inner_.grid(); }
    std::span<const double> values() const { return inner_.values(); }
    std::span<const double> node_derivs() const { return inner_.derivs(); }

private:
    static HermiteFn make_inner(std::shared_ptr<const PeriodicGrid> grid,
                                std::vector<double> values) {
        if (!grid) throw std::invalid_argument("SplineFn: null grid");
        if (values.size() != grid->size()) {
            throw std::invalid_argument("SplineFn: values length must equal grid size");
        }
        auto derivs = detail::periodic_spline_derivs(*grid, values);
        return HermiteFn(std::move(grid), std::move(values), std::move(derivs));
    }

    HermiteFn inner_;
};

inline SplineFn spline_interpolate(std::shared_ptr<const PeriodicGrid> grid,
                                   std::vector<double> values) {
    return SplineFn(std::move(grid), std::move(values));
}
inline SplineFn spline_interpolate(const PeriodicGrid& grid, std::vector<double> values) {
    return SplineFn(grid, std::move(values));
}

/// Symmetric cubic Lagrange interpolation on the 4-point centered stencil
/// {j-1, j, j+1, j+2} (mod M). Uniform grids only; C0 across cells.
class LagrangeFn {
public:
    LagrangeFn(std::shared_ptr<const PeriodicGrid> grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (!grid_) throw std::invalid_argument("LagrangeFn: null grid");
        if (!grid_->is_uniform()) {
            throw std::invalid_argument("LagrangeFn: requires a uniform grid");
        }
        if (values_.size() != grid_->size()) {
            throw std::invalid_argument("LagrangeFn: values length must equal grid size");
        }
    }
    LagrangeFn(const PeriodicGrid& grid, std::vector<double> values)
        : LagrangeFn(std::make_shared<PeriodicGrid>(grid), std::move(values)) {}

    double eval(double x) const {
        const auto [v, s] = stencil_at(x);
        // basis on stencil offsets {-1,0,1,2} in the local coordinate
        const double lm = -s * (s - 1.0) * (s - 2.0) / 6.0;
        const double l0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        const double l1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        const double l2 = (s + 1.0) * s * (s - 1.0) / 6.0;
        return v[0] * lm + v[1] * l0 + v[2] * l1 + v[3] * l2;
    }
    double eval_deriv(double x) const {
        const auto [v, s] = stencil_at(x);
        const double lm = -(3.0 * s * s - 6.0 * s + 2.0) / 6.0;
        const double l0 = (3.0 * s * s - 4.0 * s - 1.0) / 2.0;
        const double l1 = -(3.0 * s * s - 2.0 * s - 2.0) / 2.0;
        const double l2 = (3.0 * s * s - 1.0) / 6.0;
        return (v[0] * lm + v[1] * l0 + v[2] * l1 + v[3] * l2) / grid_->width(0);
    }
    double eval_deriv2(double x) const {
        const auto [v, s] = stencil_at(x);
        const double h = grid_->width(0);
        return (v[0] * (1.0 - s) + v[1] * (3.0 * s - 2.0) + v[2] * (1.0 - 3.0 * s) + v[3] * s) /
               (h * h);
    }

    const PeriodicGrid& grid() const { return *grid_; }
    std::span<const double> values() const { return values_; }

private:
    std::pair<std::array<double, 4>, double> stencil_at(double x) const {
        const double w = wrap(x);
        const std::size_t m = grid_->size();
        const std::size_t j = grid_->locate(w);
        const double s = (w - grid_->node(j)) / grid_->width(j);
        return {{values_[(j + m - 1) % m], values_[j], values_[(j + 1) % m],
                 values_[(j + 2) % m]},
                s};
    }

    std::shared_ptr<const PeriodicGrid> grid_;
    std::vector<double> values_;
};

/// Outcome of the L2 instability probe below.
struct WitnessResult {
    double interpolant_norm;  // || I v^n ||_{L2}; identically 1 by construction
    double function_norm;     // || v^n ||_{L2}
    double ratio;             // interpolant_norm / function_norm
};

/// Probe for the L2 unboundedness of the Hermite interpolation operator.
/// The witness v equals 1 - 8 s^2 (1-s)^2 in each cell's local coordinate:
/// v(x_j) = 1, Dv(x_j) = 0, and v dips to 1/2 at mid-cell. For v^n the
/// Hermite interpolant is the constant 1, while ||v^n||_{L2} -> 0, so the
/// returned ratio grows without bound (like n^{1/4}).
inline WitnessResult unboundedness_witness(const PeriodicGrid& grid, long long n) {
    if (n < 1) throw std::invalid_argument("unboundedness_witness: n must be >= 1");

    // numerator: quadrature of the actual interpolant of (v^n, Dv^n) node data
    const std::size_t m = grid.size();
    HermiteFn interp(grid, std::vector<double>(m, 1.0), std::vector<double>(m, 0.0));
    const double num = l2_norm_cells(grid, [&](double x) { return interp.eval(x); }, 4);

    // denominator: the local-coordinate profile is the same in every cell, so
    //   int_T v^{2n} dx = (sum_j h_j) * int_0^1 (1 - 8 s^2 (1-s)^2)^{2n} ds
    // and sum_j h_j = 1. The integrand is 1 at s in {0,1} and decays on the
    // scale s ~ (32 n)^{-1/2}, so integrate on a geometrically graded mesh.
    const auto integrand = [&](double s) {
        const double v = 1.0 - 8.0 * s * s * (1.0 - s) * (1.0 - s);
        return std::exp(2.0 * static_cast<double>(n) * std::log(v));
    };
    const GaussRule rule(16);
    double half = 0.0;
    double a = 0.0;
    double b = std::min(0.5, 1.0 / std::sqrt(16.0 * static_cast<double>(n)));
    while (a < 0.5) {
        half += gauss_integrate(integrand, a, b, rule);
        a = b;
        b = std::min(0.5, 2.0 * b);
        if (b <= a) break;
    }
    const double den = std::sqrt(2.0 * half);  // symmetric about s = 1/2

    return WitnessResult{num, den, num / den};
}

}  // namespace cipsl
