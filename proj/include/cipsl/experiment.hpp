#pragma once

// Experiment driver: convergence studies of the built-in benchmark in
// three regimes (dt = h, fixed dt, fixed h) and one-step phase sweeps,
// with deterministic CSV output and a self-contained SVG chart.

#include <cstdarg>
#include <cstdio>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cipsl/norms.hpp"
#include "cipsl/problems.hpp"
#include "cipsl/reference.hpp"
#include "cipsl/schemes.hpp"
#include "cipsl/spectral.hpp"

namespace cipsl {

enum class Command { converge, phase };
enum class Regime { coupled, fixed_dt, fixed_h };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::coupled: return "coupled";
        case Regime::fixed_dt: return "fixed-dt";
        case Regime::fixed_h: return "fixed-h";
    }
    return "?";
}

inline Regime regime_from_string(const std::string& name) {
    if (name == "coupled") return Regime::coupled;
    if (name == "fixed-dt") return Regime::fixed_dt;
    if (name == "fixed-h") return Regime::fixed_h;
    throw std::invalid_argument("unknown regime: " + name);
}

struct ExperimentConfig {
    Command command = Command::converge;
    std::vector<Scheme> schemes;
    Regime regime = Regime::coupled;
    /// M values for coupled / fixed-dt, N values for fixed-h.
    std::vector<std::size_t> levels = {80, 160, 320};
    double fixed = 0.0;  // the pinned dt (fixed-dt) or h (fixed-h)
    std::size_t mtilde = 6000;
    double mu = 0.4;
    std::size_t phase_m = 40;
    std::string out_path;
    std::string svg_path;
    bool full = false;
    double reference_tol = 1e-12;
};

inline void validate_config(const ExperimentConfig& c) {
    if (c.schemes.empty()) throw std::invalid_argument("config: no schemes selected");
    if (c.mtilde < 100) throw std::invalid_argument("config: mtilde must be at least 100");
    if (c.command == Command::converge) {
        if (c.levels.empty()) throw std::invalid_argument("config: no resolution levels");
        for (std::size_t i = 1; i < c.levels.size(); ++i) {
            if (c.levels[i] <= c.levels[i - 1]) {
                throw std::invalid_argument("config: levels must be strictly increasing");
            }
        }
        if (c.regime != Regime::coupled && !(c.fixed > 0.0)) {
            throw std::invalid_argument("config: this regime requires --fixed > 0");
        }
        for (Scheme s : c.schemes) {
            if (s == Scheme::upwind) {
                throw std::invalid_argument(
                    "config: the upwind scheme needs a constant velocity and cannot run "
                    "the convergence benchmark");
            }
        }
    } else {
        if (c.phase_m < 4 || c.phase_m % 2 != 0) {
            throw std::invalid_argument("config: phase M must be even and at least 4");
        }
        if (c.mu < 0.0) throw std::invalid_argument("config: mu must be nonnegative");
    }
}

struct RowOutcome {
    std::size_t level = 0;
    std::optional<ErrorRow> row;
    std::string error;    // set when the row could not be computed
    std::string warning;  // e.g. the step left the small-dt regime
};

struct ConvergenceResult {
    ExperimentConfig config;
    std::vector<std::pair<Scheme, std::vector<RowOutcome>>> by_scheme;
    bool all_ok = true;
};

namespace detail {

inline std::string strfmt(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

struct Resolution {
    std::size_t m = 0;
    std::size_t n = 0;
};

inline Resolution resolve_level(Regime regime, std::size_t level, double fixed, double horizon) {
    Resolution r;
    switch (regime) {
        case Regime::coupled:
            r.m = level;
            r.n = static_cast<std::size_t>(std::llround(horizon * static_cast<double>(level)));
            break;
        case Regime::fixed_dt:
            r.m = level;
            r.n = static_cast<std::size_t>(std::llround(horizon / fixed));
            break;
        case Regime::fixed_h:
            r.m = static_cast<std::size_t>(std::llround(1.0 / fixed));
            r.n = level;
            break;
    }
    return r;
}

template <class Interp>
SampledPair sample_against_reference(const Interp& fn, const ReferenceTable& ref) {
    const std::size_t q_count = ref.x.size();
    SampledPair pair;
    pair.x = ref.x;
    pair.ref_value = ref.value;
    pair.ref_d1 = ref.d1;
    pair.ref_d2 = ref.d2;
    pair.num_value.resize(q_count);
    pair.num_d1.resize(q_count);
    pair.num_d2.resize(q_count);
    for (std::size_t q = 0; q < q_count; ++q) {
        pair.num_value[q] = fn.eval(ref.x[q]);
        pair.num_d1[q] = fn.eval_deriv(ref.x[q]);
        pair.num_d2[q] = fn.eval_deriv2(ref.x[q]);
    }
    pair.validate();
    return pair;
}

template <class Interp>
ErrorRow measure_row(const Interp& fn, const ReferenceTable& ref, std::size_t m, std::size_t n,
                     double horizon) {
    const SampledPair pair = sample_against_reference(fn, ref);
    ErrorRow row;
    row.m = m;
    row.n = n;
    row.h = 1.0 / static_cast<double>(m);
    row.dt = horizon / static_cast<double>(n);
    row.l2 = pair.l2();
    row.h1 = pair.h1();
    row.h2 = pair.h2();
    row.wh2 = pair.wh2(row.h, row.dt);
    return row;
}

inline RowOutcome convergence_row(Scheme scheme, const Problem& problem,
                                  const ReferenceTable& ref, const ExperimentConfig& cfg,
                                  std::size_t level) {
    RowOutcome out;
    out.level = level;
    try {
        const auto res = resolve_level(cfg.regime, level, cfg.fixed, problem.horizon);
        const std::size_t guard = cfg.full ? 2'000'000 : 4096;
        if (res.m < 4) throw std::invalid_argument("mesh too coarse (M < 4)");
        if (res.n < 1) throw std::invalid_argument("no time steps");
        if (res.m > guard || res.n > guard) {
            throw std::runtime_error(
                strfmt("resolution M=%zu N=%zu exceeds the guard (%zu); rerun with --full",
                       res.m, res.n, guard));
        }
        const auto grid = std::make_shared<const PeriodicGrid>(PeriodicGrid::uniform(res.m));
        const SchemeState final_state = run(scheme, problem, grid, res.n);
        if (final_state.max_ux_dt > 0.5) {
            out.warning = strfmt("dt * sup|u_x| = %.3f exceeds 1/2; outside the small-step "
                                 "regime the derivative bounds assume",
                                 final_state.max_ux_dt);
        }
        switch (scheme) {
            case Scheme::cip: {
                const HermiteFn fn(grid, final_state.values, final_state.derivs);
                out.row = measure_row(fn, ref, res.m, res.n, problem.horizon);
                break;
            }
            case Scheme::spline: {
                const SplineFn fn(grid, final_state.values);
                out.row = measure_row(fn, ref, res.m, res.n, problem.horizon);
                break;
            }
            case Scheme::lagrange: {
                const LagrangeFn fn(grid, final_state.values);
                out.row = measure_row(fn, ref, res.m, res.n, problem.horizon);
                break;
            }
            case Scheme::upwind:
                throw std::invalid_argument("upwind scheme not supported here");
        }
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace detail

/// Run the convergence study described by the config on the built-in
/// benchmark problem. Rows run concurrently; output order is fixed by the
/// config. A shared ReferenceCache avoids rebuilding the reference
/// solution across studies.
inline ConvergenceResult run_convergence(const ExperimentConfig& cfg,
                                         ReferenceCache* cache = nullptr) {
    validate_config(cfg);
    ConvergenceResult result;
    result.config = cfg;

    const Problem problem = default_benchmark_problem();
    ReferenceCache local;
    ReferenceCache& refs = cache ? *cache : local;
    const auto ref = refs.get(problem, cfg.mtilde, cfg.reference_tol);

    for (const Scheme scheme : cfg.schemes) {
        std::vector<std::future<RowOutcome>> futures;
        futures.reserve(cfg.levels.size());
        for (const std::size_t level : cfg.levels) {
            futures.push_back(std::async(std::launch::async, [&, scheme, level] {
                return detail::convergence_row(scheme, problem, *ref, cfg, level);
            }));
        }
        std::vector<RowOutcome> outcomes;
        outcomes.reserve(futures.size());
        for (auto& f : futures) outcomes.push_back(f.get());

        // rates between consecutive successful rows
        ErrorReport ok_rows;
        for (const auto& o : outcomes) {
            if (o.row) ok_rows.rows.push_back(*o.row);
        }
        fill_rates(ok_rows, cfg.regime == Regime::fixed_h);
        std::size_t next = 0;
        for (auto& o : outcomes) {
            if (o.row) o.row = ok_rows.rows[next++];
            if (!o.error.empty()) result.all_ok = false;
        }
        result.by_scheme.emplace_back(scheme, std::move(outcomes));
    }
    return result;
}

inline void write_convergence_csv(const ConvergenceResult& result, std::ostream& os) {
    os << "scheme,regime,M,N,h,dt,l2,l2_rate,h1,h1_rate,h2,h2_rate,wh2,wh2_rate\n";
    const auto rate = [](const std::optional<double>& r) {
        return r ? detail::strfmt("%.3f", *r) : std::string();
    };
    for (const auto& [scheme, outcomes] : result.by_scheme) {
        for (const auto& o : outcomes) {
            if (!o.row) {
                os << "# " << to_string(scheme) << " level=" << o.level
                   << " error: " << o.error << "\n";
                continue;
            }
            if (!o.warning.empty()) {
                os << "# " << to_string(scheme) << " level=" << o.level
                   << " warning: " << o.warning << "\n";
            }
            const ErrorRow& r = *o.row;
            os << to_string(scheme) << ',' << to_string(result.config.regime) << ',' << r.m
               << ',' << r.n << ',' << detail::strfmt("%.10g", r.h) << ','
               << detail::strfmt("%.10g", r.dt) << ',' << detail::strfmt("%.4e", r.l2) << ','
               << rate(r.l2_rate) << ',' << detail::strfmt("%.4e", r.h1) << ','
               << rate(r.h1_rate) << ',' << detail::strfmt("%.4e", r.h2) << ','
               << rate(r.h2_rate) << ',' << detail::strfmt("%.4e", r.wh2) << ','
               << rate(r.wh2_rate) << "\n";
        }
    }
}

/// Human-readable table mirroring the CSV, 4 significant digits.
inline std::string render_convergence_table(const ConvergenceResult& result) {
    std::ostringstream os;
    const auto rate = [](const std::optional<double>& r) {
        return r ? detail::strfmt("%7.3f", *r) : std::string(7, ' ');
    };
    for (const auto& [scheme, outcomes] : result.by_scheme) {
        os << "scheme " << to_string(scheme) << " (" << to_string(result.config.regime)
           << ")\n";
        os << "      M       N         L2    rate         H1    rate         H2    rate"
              "        wH2    rate\n";
        for (const auto& o : outcomes) {
            if (!o.row) {
                os << "  level " << o.level << ": " << o.error << "\n";
                continue;
            }
            const ErrorRow& r = *o.row;
            os << detail::strfmt("%7zu %7zu  %.3e %s  %.3e %s  %.3e %s  %.3e %s\n", r.m, r.n,
                                 r.l2, rate(r.l2_rate).c_str(), r.h1, rate(r.h1_rate).c_str(),
                                 r.h2, rate(r.h2_rate).c_str(), r.wh2,
                                 rate(r.wh2_rate).c_str());
        }
    }
    return os.str();
}

struct PhaseResult {
    ExperimentConfig config;
    std::vector<std::pair<Scheme, std::vector<PhaseRow>>> by_scheme;
    std::vector<std::pair<Scheme, std::string>> errors;
    bool all_ok = true;
};

inline PhaseResult run_phase(const ExperimentConfig& cfg) {
    validate_config(cfg);
    PhaseResult result;
    result.config = cfg;
    for (const Scheme scheme : cfg.schemes) {
        try {
            const Scheme one[] = {scheme};
            result.by_scheme.emplace_back(scheme, phase_table(one, cfg.phase_m, cfg.mu));
        } catch (const std::exception& e) {
            result.errors.emplace_back(scheme, e.what());
            result.all_ok = false;
        }
    }
    return result;
}

inline void write_phase_csv(const PhaseResult& result, std::ostream& os) {
    os << "scheme,k,kh,theta,theta_unwrapped,theta_exact,amplification\n";
    for (const auto& [scheme, message] : result.errors) {
        os << "# " << to_string(scheme) << " error: " << message << "\n";
    }
    for (const auto& [scheme, rows] : result.by_scheme) {
        for (const auto& row : rows) {
            os << to_string(scheme) << ',' << row.k << ',' << detail::strfmt("%.6f", row.kh)
               << ',' << detail::strfmt("%.10e", row.theta) << ','
               << detail::strfmt("%.10e", row.theta_unwrapped) << ','
               << detail::strfmt("%.10e", row.theta_exact) << ','
               << detail::strfmt("%.10e", row.amplification) << "\n";
        }
    }
}

namespace detail {

inline const char* scheme_color(Scheme s) {
    switch (s) {
        case Scheme::cip: return "#1f77b4";
        case Scheme::spline: return "#2ca02c";
        case Scheme::lagrange: return "#ff7f0e";
        case Scheme::upwind: return "#9467bd";
    }
    return "#000000";
}

}  // namespace detail

/// Minimal SVG 1.1 line chart of the unwrapped phase shift against kh,
/// one polyline per scheme plus the exact line.
inline void write_phase_svg(const PhaseResult& result, std::ostream& os) {
    const double left = 80.0, right = 640.0, top = 60.0, bottom = 540.0;

    double ymin = 0.0, ymax = 0.0;
    for (const auto& [scheme, rows] : result.by_scheme) {
        for (const auto& row : rows) {
            ymin = std::min({ymin, row.theta_unwrapped, row.theta_exact});
            ymax = std::max({ymax, row.theta_unwrapped, row.theta_exact});
        }
    }
    if (ymax <= ymin) ymax = ymin + 1.0;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    const double xmax = 0.5;

    const auto px = [&](double kh) { return left + (right - left) * kh / xmax; };
    const auto py = [&](double th) {
        return bottom - (bottom - top) * (th - ymin) / (ymax - ymin);
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
          "viewBox=\"0 0 800 600\" font-family=\"sans-serif\" font-size=\"14\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    os << detail::strfmt(
        "<text x=\"%.0f\" y=\"30\" font-size=\"17\">one-step phase shift (mu=%.3g, M=%zu)"
        "</text>\n",
        left, result.config.mu, result.config.phase_m);

    // axes
    os << detail::strfmt(
        "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
        bottom, right, bottom);
    os << detail::strfmt(
        "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
        bottom, left, top);
    for (int i = 0; i <= 5; ++i) {
        const double kh = xmax * i / 5.0;
        os << detail::strfmt(
            "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
            px(kh), bottom, px(kh), bottom + 6.0);
        os << detail::strfmt(
            "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.1f</text>\n", px(kh),
            bottom + 24.0, kh);
    }
    for (int i = 0; i <= 5; ++i) {
        const double th = ymin + (ymax - ymin) * i / 5.0;
        os << detail::strfmt(
            "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
            left - 6.0, py(th), left, py(th));
        os << detail::strfmt(
            "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.2f</text>\n", left - 10.0,
            py(th) + 5.0, th);
    }
    os << detail::strfmt(
        "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">kh</text>\n",
        0.5 * (left + right), bottom + 45.0);
    os << detail::strfmt(
        "<text x=\"22\" y=\"%.1f\" transform=\"rotate(-90 22 %.1f)\" "
        "text-anchor=\"middle\">phase shift [rad]</text>\n",
        0.5 * (top + bottom), 0.5 * (top + bottom));

    // exact line
    os << detail::strfmt(
        "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\" "
        "stroke-dasharray=\"6 4\"/>\n",
        px(0.0), py(0.0), px(xmax),
        py(2.0 * std::numbers::pi * result.config.mu * xmax));

    for (const auto& [scheme, rows] : result.by_scheme) {
        std::ostringstream pts;
        for (const auto& row : rows) {
            pts << detail::strfmt("%.2f,%.2f ", px(row.kh), py(row.theta_unwrapped));
        }
        os << "<polyline fill=\"none\" stroke=\"" << detail::scheme_color(scheme)
           << "\" stroke-width=\"2\" points=\"" << pts.str() << "\"/>\n";
    }

    // legend
    double ly = top + 10.0;
    os << detail::strfmt(
        "<line x1=\"%.0f\" y1=\"%.1f\" x2=\"%.0f\" y2=\"%.1f\" stroke=\"black\" "
        "stroke-dasharray=\"6 4\"/><text x=\"%.0f\" y=\"%.1f\">exact</text>\n",
        right + 20.0, ly, right + 50.0, ly, right + 58.0, ly + 5.0);
    for (const auto& [scheme, rows] : result.by_scheme) {
        ly += 24.0;
        os << detail::strfmt(
            "<line x1=\"%.0f\" y1=\"%.1f\" x2=\"%.0f\" y2=\"%.1f\" stroke=\"%s\" "
            "stroke-width=\"2\"/><text x=\"%.0f\" y=\"%.1f\">%s</text>\n",
            right + 20.0, ly, right + 50.0, ly, detail::scheme_color(scheme), right + 58.0,
            ly + 5.0, to_string(scheme));
    }
    os << "</svg>\n";
}

}  // namespace cipsl
