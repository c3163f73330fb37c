#pragma once

// Phase-shift analysis of one-step methods on a uniform grid with
// constant velocity. The probe seeds exp(2 pi i k x), runs one step of a
// scheme on the real and imaginary parts separately (every scheme here is
// linear with real coefficients), and reads the k-th DFT coefficient of
// the result against the initial one:
//
//   theta_k = -arg( F(phi^1)[k] / F(phi^0)[k] ),   exact value 2 pi mu k h.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "cipsl/schemes.hpp"

namespace cipsl {

/// F(v)[k] = sum_j v_j exp(-2 pi i k x_j) on the uniform grid x_j = j/M;
/// no 1/M normalization. |k| must not exceed M/2.
inline std::complex<double> dft_coefficient(std::span<const std::complex<double>> values,
                                            long k) {
    const std::size_t m = values.size();
    if (m == 0) throw std::invalid_argument("dft_coefficient: empty sample set");
    if (2 * std::abs(k) > static_cast<long>(m)) {
        throw std::invalid_argument("dft_coefficient: wavenumber beyond the Nyquist range");
    }
    using std::numbers::pi;
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const double phase = -2.0 * pi * static_cast<double>(k) * static_cast<double>(j) /
                             static_cast<double>(m);
        acc += values[j] * std::polar(1.0, phase);
    }
    return acc;
}

inline std::complex<double> dft_coefficient(std::span<const double> values, long k) {
    std::vector<std::complex<double>> v(values.begin(), values.end());
    return dft_coefficient(std::span<const std::complex<double>>(v), k);
}

/// One wavenumber of a phase sweep.
struct PhaseRow {
    long k = 0;
    double kh = 0.0;               // normalized wavenumber in (0, 1/2]
    double theta = 0.0;            // measured shift, in (-pi, pi]
    double theta_unwrapped = 0.0;  // continuous-in-k branch, for plotting
    double theta_exact = 0.0;      // 2 pi mu k h
    double amplification = 0.0;    // modulus of the one-step symbol
};

namespace detail {

/// One step of the scheme on complex-exponential data; returns the
/// complex symbol F(phi^1)[k] / F(phi^0)[k].
inline std::complex<double> one_step_symbol(Scheme kind, std::size_t m, double mu, long k) {
    using std::numbers::pi;
    const auto grid = std::make_shared<const PeriodicGrid>(PeriodicGrid::uniform(m));
    const double h = grid->width(0);
    const double dt = mu * h;  // velocity fixed to u = 1: only mu matters
    const VelocityField vel = VelocityField::constant(1.0);

    const double w = 2.0 * pi * static_cast<double>(k);
    SchemeState re, im;
    re.grid = grid;
    im.grid = grid;
    re.values.resize(m);
    im.values.resize(m);
    if (kind == Scheme::cip) {
        re.derivs.resize(m);
        im.derivs.resize(m);
    }
    for (std::size_t j = 0; j < m; ++j) {
        const double x = grid->node(j);
        re.values[j] = std::cos(w * x);
        im.values[j] = std::sin(w * x);
        if (kind == Scheme::cip) {
            // derivative of exp(i w x): i w exp(i w x)
            re.derivs[j] = -w * std::sin(w * x);
            im.derivs[j] = w * std::cos(w * x);
        }
    }

    std::vector<std::complex<double>> before(m), after(m);
    for (std::size_t j = 0; j < m; ++j) before[j] = {re.values[j], im.values[j]};

    if (dt > 0.0) {
        re = step(kind, re, vel, dt);
        im = step(kind, im, vel, dt);
    }
    for (std::size_t j = 0; j < m; ++j) after[j] = {re.values[j], im.values[j]};

    const auto denom = dft_coefficient(std::span<const std::complex<double>>(before), k);
    const auto numer = dft_coefficient(std::span<const std::complex<double>>(after), k);
    return numer / denom;
}

}  // namespace detail

/// Measured phase shift of one scheme step at CFL number mu and
/// wavenumber k on the uniform M-point grid. |k| in [1, M/2].
inline PhaseRow phase_shift(Scheme kind, std::size_t m, double mu, long k) {
    using std::numbers::pi;
    if (k == 0 || 2 * std::abs(k) > static_cast<long>(m)) {
        throw std::invalid_argument("phase_shift: wavenumber must satisfy 1 <= |k| <= M/2");
    }
    if (mu < 0.0) throw std::invalid_argument("phase_shift: mu must be nonnegative");

    const double h = 1.0 / static_cast<double>(m);
    const auto symbol = detail::one_step_symbol(kind, m, mu, k);

    PhaseRow row;
    row.k = k;
    row.kh = static_cast<double>(k) * h;
    row.theta = -std::arg(symbol);
    row.theta_unwrapped = row.theta;
    row.theta_exact = 2.0 * pi * mu * static_cast<double>(k) * h;
    row.amplification = std::abs(symbol);
    return row;
}

/// Full sweep k = 1..M/2 for each scheme, rows ordered by (scheme, k);
/// theta_unwrapped carries the branch continuous in k.
inline std::vector<PhaseRow> phase_table(std::span<const Scheme> kinds, std::size_t m,
                                         double mu) {
    using std::numbers::pi;
    std::vector<PhaseRow> rows;
    rows.reserve(kinds.size() * (m / 2));
    for (const Scheme kind : kinds) {
        double prev = 0.0;
        for (long k = 1; k <= static_cast<long>(m / 2); ++k) {
            PhaseRow row = phase_shift(kind, m, mu, k);
            const double wraps = std::round((prev - row.theta) / (2.0 * pi));
            row.theta_unwrapped = row.theta + 2.0 * pi * wraps;
            prev = row.theta_unwrapped;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace cipsl
