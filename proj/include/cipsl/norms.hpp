#pragma once

// Error measurement: the composite-Simpson error functional on 2*Mt
// equispaced samples of the circle, relative L2 / H1 / H2 errors, the
// weighted-H2 combination, and convergence rates.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cipsl/quadrature.hpp"

namespace cipsl {

/// Composite Simpson functional over periodic samples s(x_q), x_q = q/(2*Mt):
///   [ (1/(6*Mt)) * sum_{j=1..Mt} ( 4 s(x_{2j-1}) + 2 s(x_{2j}) ) ]^{1/2}
/// with indices mod 2*Mt so the periodic endpoint folds in.
inline double simpson_functional(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("simpson_functional: need an even sample count");
    }
    const std::size_t mt = n / 2;
    std::vector<double> terms(n);
    for (std::size_t q = 0; q < n; ++q) {
        terms[q] = (q % 2 == 1 ? 4.0 : 2.0) * samples[q];
    }
    const double total = pairwise_sum(terms) / (6.0 * static_cast<double>(mt));
    return std::sqrt(std::max(total, 0.0));
}

namespace detail {

inline double simpson_of_squares(std::span<const double> v) {
    std::vector<double> sq(v.size());
    for (std::size_t q = 0; q < v.size(); ++q) sq[q] = v[q] * v[q];
    return simpson_functional(sq);
}

inline double simpson_of_squared_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("norms: sample arrays differ in length");
    }
    std::vector<double> sq(a.size());
    for (std::size_t q = 0; q < a.size(); ++q) {
        const double d = a[q] - b[q];
        sq[q] = d * d;
    }
    return simpson_functional(sq);
}

}  // namespace detail

/// Relative L2 error between sampled numerical and reference values.
inline double relative_error_from_samples(std::span<const double> num,
                                          std::span<const double> ref) {
    const double den = detail::simpson_of_squares(ref);
    if (den == 0.0) {
        throw std::domain_error("relative error: reference norm is zero");
    }
    return detail::simpson_of_squared_diff(num, ref) / den;
}

/// A function on the circle together with its first two derivatives,
/// the shape consumed by the seminorm error routines.
struct SampledSolution {
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
};

namespace detail {

inline std::vector<double> sample_circle(const std::function<double(double)>& f,
                                         std::size_t mtilde) {
    const std::size_t n = 2 * mtilde;
    std::vector<double> out(n);
    for (std::size_t q = 0; q < n; ++q) {
        out[q] = f(static_cast<double>(q) / static_cast<double>(n));
    }
    return out;
}

}  // namespace detail

/// Relative L2 error of num against ref, sampled at 2*mtilde points.
template <class F1, class F2>
double relative_l2_error(F1&& num, F2&& ref, std::size_t mtilde) {
    const std::size_t n = 2 * mtilde;
    std::vector<double> a(n), b(n);
    for (std::size_t q = 0; q < n; ++q) {
        const double x = static_cast<double>(q) / static_cast<double>(n);
        a[q] = num(x);
        b[q] = ref(x);
    }
    return relative_error_from_samples(a, b);
}

/// Relative H^m seminorm error (m = 1 or 2): the Simpson ratio applied to
/// the m-th derivatives of both functions.
inline double seminorm_error(const SampledSolution& num, const SampledSolution& ref,
                             int order, std::size_t mtilde) {
    if (order != 1 && order != 2) {
        throw std::invalid_argument("seminorm_error: order must be 1 or 2");
    }
    const auto& fn = order == 1 ? num.d1 : num.d2;
    const auto& fr = order == 1 ? ref.d1 : ref.d2;
    const auto a = detail::sample_circle(fn, mtilde);
    const auto b = detail::sample_circle(fr, mtilde);
    return relative_error_from_samples(a, b);
}

/// Weighted-H2 relative error composed from the relative L2 and relative H2
/// seminorm errors:  sqrt( l2^2 + (h^4/dt) * h2^2 ).
inline double weighted_h2_error(double rel_l2, double rel_h2, double h, double dt) {
    if (h <= 0.0 || dt <= 0.0) {
        throw std::invalid_argument("weighted_h2_error: h and dt must be positive");
    }
    const double c = h * h * h * h / dt;
    return std::sqrt(rel_l2 * rel_l2 + c * rel_h2 * rel_h2);
}

/// Full form evaluating both constituents at 2*mtilde samples.
inline double weighted_h2_error(const SampledSolution& num, const SampledSolution& ref,
                                double h, double dt, std::size_t mtilde) {
    const auto av = detail::sample_circle(num.value, mtilde);
    const auto bv = detail::sample_circle(ref.value, mtilde);
    const double l2 = relative_error_from_samples(av, bv);
    const double h2 = seminorm_error(num, ref, 2, mtilde);
    return weighted_h2_error(l2, h2, h, dt);
}

/// Numerical and reference samples (values and first two derivatives) on
/// the fine measurement grid x_q = q/(2*mtilde); the input of one error
/// row.
struct SampledPair {
    std::vector<double> x;
    std::vector<double> num_value, num_d1, num_d2;
    std::vector<double> ref_value, ref_d1, ref_d2;

    void validate() const {
        const std::size_t n = x.size();
        if (n < 8 || n % 2 != 0) {
            throw std::invalid_argument("SampledPair: need an even sample count, mtilde >= 4");
        }
        for (const auto* v : {&num_value, &num_d1, &num_d2, &ref_value, &ref_d1, &ref_d2}) {
            if (v->size() != n) throw std::invalid_argument("SampledPair: length mismatch");
        }
        for (double r : ref_value) {
            if (!std::isfinite(r)) {
                throw std::invalid_argument("SampledPair: non-finite reference value");
            }
        }
    }

    double l2() const { return relative_error_from_samples(num_value, ref_value); }
    double h1() const { return relative_error_from_samples(num_d1, ref_d1); }
    double h2() const { return relative_error_from_samples(num_d2, ref_d2); }
    double wh2(double h, double dt) const { return weighted_h2_error(l2(), h2(), h, dt); }
};

/// rho = (log e1 - log e2) / (log h1 - log h2), natural logs.
inline double convergence_rate(double e1, double e2, double h1, double h2) {
    if (e1 <= 0.0 || e2 <= 0.0 || h1 <= 0.0 || h2 <= 0.0) {
        throw std::invalid_argument("convergence_rate: inputs must be positive");
    }
    if (h1 == h2) {
        throw std::invalid_argument("convergence_rate: resolutions must differ");
    }
    return (std::log(e1) - std::log(e2)) / (std::log(h1) - std::log(h2));
}

/// One resolution of a convergence study: errors in the four norms plus
/// the rates against the previous row (empty on the first row).
struct ErrorRow {
    std::size_t m = 0;
    std::size_t n = 0;
    double h = 0.0;
    double dt = 0.0;
    double l2 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    double wh2 = 0.0;
    std::optional<double> l2_rate;
    std::optional<double> h1_rate;
    std::optional<double> h2_rate;
    std::optional<double> wh2_rate;
};

struct ErrorReport {
    std::vector<ErrorRow> rows;
};

/// Fill in pairwise rates between consecutive rows; rate_on_dt selects the
/// step size (fixed-h regime) instead of the mesh size as the abscissa.
inline void fill_rates(ErrorReport& report, bool rate_on_dt) {
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        ErrorRow& cur = report.rows[i];
        const ErrorRow& prev = report.rows[i - 1];
        const double b1 = rate_on_dt ? prev.dt : prev.h;
        const double b2 = rate_on_dt ? cur.dt : cur.h;
        if (b1 == b2) continue;
        cur.l2_rate = convergence_rate(prev.l2, cur.l2, b1, b2);
        cur.h1_rate = convergence_rate(prev.h1, cur.h1, b1, b2);
        cur.h2_rate = convergence_rate(prev.h2, cur.h2, b1, b2);
        cur.wh2_rate = convergence_rate(prev.wh2, cur.wh2, b1, b2);
    }
}

}  // namespace cipsl
