#pragma once

// Periodic spatial mesh on the unit circle T = [0,1).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace cipsl {

/// Wrap a finite real onto [0,1).
inline double wrap(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("wrap: non-finite input");
    }
    double r = x - std::floor(x);
    if (r >= 1.0) r -= 1.0;  // x - floor(x) can round up to 1.0
    return r;
}

/// Strictly increasing node set x_0 = 0 < x_1 < ... < x_{M-1} < 1 with
/// cell widths h_j = x_{j+1} - x_j (x_M identified with x_0 + 1).
/// Immutable after construction; safe to share across threads.
class PeriodicGrid {
public:
    static PeriodicGrid uniform(std::size_t m) {
        if (m < 4) {
            throw std::invalid_argument("PeriodicGrid::uniform: need at least 4 nodes");
        }
        std::vector<double> nodes(m);
        for (std::size_t j = 0; j < m; ++j) {
            nodes[j] = static_cast<double>(j) / static_cast<double>(m);
        }
        return PeriodicGrid(std::move(nodes), /*uniform=*/true);
    }

    /// Build from explicit node positions; uniformity is detected.
    static PeriodicGrid from_nodes(std::vector<double> nodes) {
        return PeriodicGrid(std::move(nodes), /*uniform=*/false);
    }

    std::size_t size() const { return nodes_.size(); }
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> widths() const { return widths_; }
    double node(std::size_t j) const { return nodes_[j]; }
    double width(std::size_t j) const { return widths_[j]; }
    double h_max() const { return h_max_; }
    bool is_uniform() const { return uniform_; }

    /// Right endpoint of cell j; equals 1.0 for the last cell.
    double cell_right(std::size_t j) const {
        return j + 1 < nodes_.size() ? nodes_[j + 1] : 1.0;
    }

    /// Cell index j with node(j) <= wrap(x) < cell_right(j).
    std::size_t locate(double x) const {
        const double w = wrap(x);
        const std::size_t m = nodes_.size();
        std::size_t j;
        if (uniform_) {
            j = static_cast<std::size_t>(w * static_cast<double>(m));
            if (j >= m) j = m - 1;
            // rounding of w*m can land one cell off
            while (j > 0 && w < nodes_[j]) --j;
            while (j + 1 < m && w >= nodes_[j + 1]) ++j;
        } else {
            auto it = std::upper_bound(nodes_.begin(), nodes_.end(), w);
            j = static_cast<std::size_t>(it - nodes_.begin()) - 1;
        }
        return j;
    }

private:
    PeriodicGrid(std::vector<double> nodes, bool uniform)
        : nodes_(std::move(nodes)), uniform_(uniform) {
        validate();
    }

    void validate() {
        const std::size_t m = nodes_.size();
        if (m < 4) {
            throw std::invalid_argument("PeriodicGrid: need at least 4 nodes");
        }
        if (nodes_[0] != 0.0) {
            throw std::invalid_argument("PeriodicGrid: first node must be 0");
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (!std::isfinite(nodes_[j]) || nodes_[j] < 0.0 || nodes_[j] >= 1.0) {
                throw std::invalid_argument("PeriodicGrid: nodes must lie in [0,1)");
            }
            if (j > 0 && nodes_[j] <= nodes_[j - 1]) {
                throw std::invalid_argument("PeriodicGrid: nodes must be strictly increasing");
            }
        }
        widths_.resize(m);
        if (uniform_) {
            // factory-built uniform grid: cell width is exactly 1/M
            std::fill(widths_.begin(), widths_.end(), 1.0 / static_cast<double>(m));
        } else {
            for (std::size_t j = 0; j + 1 < m; ++j) widths_[j] = nodes_[j + 1] - nodes_[j];
            widths_[m - 1] = 1.0 - nodes_[m - 1];
        }
        h_max_ = *std::max_element(widths_.begin(), widths_.end());

        // Kahan sum; widths must cover the circle exactly (within 8 eps)
        double sum = 0.0, c = 0.0;
        for (double w : widths_) {
            const double y = w - c;
            const double t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        constexpr double eps = std::numeric_limits<double>::epsilon();
        if (std::abs(sum - 1.0) > 8.0 * eps) {
            throw std::invalid_argument("PeriodicGrid: cell widths do not sum to 1");
        }
        if (!uniform_) {
            uniform_ = true;
            const double h0 = widths_[0];
            for (double w : widths_) {
                if (std::abs(w - h0) > 8.0 * eps) {
                    uniform_ = false;
                    break;
                }
            }
        }
    }

    std::vector<double> nodes_;
    std::vector<double> widths_;
    double h_max_ = 0.0;
    bool uniform_ = false;
};

}  // namespace cipsl
