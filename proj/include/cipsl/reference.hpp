#pragma once

// Reference ("exact") solution sampled on the Simpson measurement grid.
//
// phi(x,T) = phi_0(xi(0;x,T)) with the foot point from the high-accuracy
// tracer;  phi_x follows from the variational factor xi_x, and phi_xx from
// xi_xx when the problem supplies u_xx and D^2 phi_0, otherwise from a
// dense fourth-order central difference of the phi_x samples.

#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <tuple>
#include <vector>

#include "cipsl/characteristics.hpp"
#include "cipsl/schemes.hpp"

namespace cipsl {

struct ReferenceTable {
    double horizon = 0.0;
    std::size_t mtilde = 0;
    double tol = 0.0;
    std::vector<double> x;      // 2*mtilde equispaced sample points
    std::vector<double> value;  // phi(x, horizon)
    std::vector<double> d1;     // phi_x
    std::vector<double> d2;     // phi_xx
};

namespace detail {

inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    std::size_t workers = std::thread::hardware_concurrency();
    if (workers < 1) workers = 1;
    if (workers > 8) workers = 8;
    if (workers == 1 || n < 64) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

inline ReferenceTable build_reference_table(const Problem& p, std::size_t mtilde,
                                            double tol = 1e-12, double horizon = -1.0) {
    if (mtilde < 4) throw std::invalid_argument("build_reference_table: mtilde too small");
    if (horizon < 0.0) horizon = p.horizon;

    ReferenceTable table;
    table.horizon = horizon;
    table.mtilde = mtilde;
    table.tol = tol;
    const std::size_t n = 2 * mtilde;
    table.x.resize(n);
    table.value.resize(n);
    table.d1.resize(n);
    table.d2.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
        table.x[q] = static_cast<double>(q) / static_cast<double>(n);
    }

    const bool full_chain = p.velocity.has_uxx() && static_cast<bool>(p.initial_deriv2);

    if (full_chain) {
        // phi_xx = xi_xx * Dphi_0(xi) + xi_x^2 * D^2 phi_0(xi)
        detail::parallel_for(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t q = lo; q < hi; ++q) {
                const auto b = reference_backtrace2(p.velocity, table.x[q], horizon, 0.0, tol);
                const double g0 = p.initial_value(b.foot);
                const double g1 = p.initial_deriv(b.foot);
                const double g2 = p.initial_deriv2(b.foot);
                table.value[q] = g0;
                table.d1[q] = b.foot_deriv * g1;
                table.d2[q] = b.foot_deriv2 * g1 + b.foot_deriv * b.foot_deriv * g2;
            }
        });
    } else {
        const auto phi_x = [&](double x) {
            const auto b = reference_backtrace(p.velocity, x, horizon, 0.0, tol);
            return b.foot_deriv * p.initial_deriv(b.foot);
        };
        detail::parallel_for(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t q = lo; q < hi; ++q) {
                const auto b = reference_backtrace(p.velocity, table.x[q], horizon, 0.0, tol);
                table.value[q] = p.initial_value(b.foot);
                table.d1[q] = b.foot_deriv * p.initial_deriv(b.foot);
                // dense five-point first derivative of phi_x, step 1e-4
                const double d = 1e-4;
                const double xq = table.x[q];
                table.d2[q] = (phi_x(xq - 2.0 * d) - 8.0 * phi_x(xq - d) + 8.0 * phi_x(xq + d) -
                               phi_x(xq + 2.0 * d)) / (12.0 * d);
            }
        });
    }
    return table;
}

/// Process-wide reuse of reference tables: one table serves every
/// resolution, scheme and regime of a study at the same horizon.
class ReferenceCache {
public:
    std::shared_ptr<const ReferenceTable> get(const Problem& p, std::size_t mtilde,
                                              double tol = 1e-12, double horizon = -1.0) {
        if (horizon < 0.0) horizon = p.horizon;
        const Key key{p.name, horizon, mtilde, tol};
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        auto table =
            std::make_shared<const ReferenceTable>(build_reference_table(p, mtilde, tol, horizon));
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.emplace(key, std::move(table)).first->second;
    }

private:
    using Key = std::tuple<std::string, double, std::size_t, double>;
    std::map<Key, std::shared_ptr<const ReferenceTable>> cache_;
    std::mutex mutex_;
};

}  // namespace cipsl
