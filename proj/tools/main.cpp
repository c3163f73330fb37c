// Command-line driver: convergence tables and phase sweeps as CSV/SVG.
//
//   cipsl converge --scheme cip --scheme spline --regime coupled \
//                  --levels 80,160,320 --out converge.csv
//   cipsl phase --M 40 --mu 0.4 --out phase.csv --svg phase.svg
//
// An optional JSON config file (--config) provides defaults; flags win.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cipsl/experiment.hpp"

namespace {

using nlohmann::json;

struct CliOptions {
    std::vector<std::string> schemes;
    std::string regime = "coupled";
    std::string levels = "80,160,320";
    double fixed = 0.0;
    std::size_t mtilde = 6000;
    double mu = 0.4;
    std::size_t phase_m = 40;
    std::string out;
    std::string svg;
    bool full = false;
};

std::vector<std::size_t> parse_levels(const std::string& csv) {
    std::vector<std::size_t> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        out.push_back(static_cast<std::size_t>(std::stoull(token)));
    }
    return out;
}

void apply_config_file(const std::string& path, CliOptions& converge, CliOptions& phase) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    in >> j;
    for (CliOptions* opts : {&converge, &phase}) {
        if (j.contains("schemes")) opts->schemes = j["schemes"].get<std::vector<std::string>>();
        if (j.contains("regime")) opts->regime = j["regime"].get<std::string>();
        if (j.contains("levels")) {
            std::string s;
            for (const auto& v : j["levels"]) {
                if (!s.empty()) s += ',';
                s += std::to_string(v.get<std::size_t>());
            }
            opts->levels = s;
        }
        if (j.contains("fixed")) opts->fixed = j["fixed"].get<double>();
        if (j.contains("mtilde")) opts->mtilde = j["mtilde"].get<std::size_t>();
        if (j.contains("mu")) opts->mu = j["mu"].get<double>();
        if (j.contains("M")) opts->phase_m = j["M"].get<std::size_t>();
        if (j.contains("out")) opts->out = j["out"].get<std::string>();
        if (j.contains("svg")) opts->svg = j["svg"].get<std::string>();
        if (j.contains("full")) opts->full = j["full"].get<bool>();
    }
}

cipsl::ExperimentConfig to_config(const CliOptions& o, cipsl::Command command) {
    cipsl::ExperimentConfig cfg;
    cfg.command = command;
    const std::vector<std::string> names =
        !o.schemes.empty() ? o.schemes
        : command == cipsl::Command::converge
            ? std::vector<std::string>{"cip", "spline"}
            : std::vector<std::string>{"cip", "spline", "lagrange", "upwind"};
    for (const auto& n : names) cfg.schemes.push_back(cipsl::scheme_from_string(n));
    cfg.regime = cipsl::regime_from_string(o.regime);
    cfg.levels = parse_levels(o.levels);
    cfg.fixed = o.fixed;
    cfg.mtilde = o.mtilde;
    cfg.mu = o.mu;
    cfg.phase_m = o.phase_m;
    cfg.out_path = o.out;
    cfg.svg_path = o.svg;
    cfg.full = o.full;
    if (o.full) cfg.reference_tol = 1e-13;
    return cfg;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

int run_converge_command(const CliOptions& opts) {
    auto cfg = to_config(opts, cipsl::Command::converge);
    if (cfg.out_path.empty()) cfg.out_path = "converge.csv";
    const auto result = cipsl::run_convergence(cfg);

    std::ostringstream csv;
    cipsl::write_convergence_csv(result, csv);
    write_file(cfg.out_path, csv.str());

    std::cout << cipsl::render_convergence_table(result);
    std::cout << "wrote " << cfg.out_path << "\n";
    if (!result.all_ok) {
        std::cerr << "some rows failed; see '#' comments in the CSV\n";
        return 1;
    }
    return 0;
}

int run_phase_command(const CliOptions& opts) {
    auto cfg = to_config(opts, cipsl::Command::phase);
    if (cfg.out_path.empty()) cfg.out_path = "phase.csv";
    if (cfg.svg_path.empty()) cfg.svg_path = "phase.svg";
    const auto result = cipsl::run_phase(cfg);

    std::ostringstream csv;
    cipsl::write_phase_csv(result, csv);
    write_file(cfg.out_path, csv.str());

    std::ostringstream svg;
    cipsl::write_phase_svg(result, svg);
    write_file(cfg.svg_path, svg.str());

    std::cout << "wrote " << cfg.out_path << " and " << cfg.svg_path << "\n";
    for (const auto& [scheme, message] : result.errors) {
        std::cerr << cipsl::to_string(scheme) << ": " << message << "\n";
    }
    return result.all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semi-Lagrangian advection schemes: convergence tables and phase analysis"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file with defaults (flags win)");

    CliOptions converge_opts, phase_opts;

    // flags are bound after the config file is applied, so parse it first
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                apply_config_file(argv[i + 1], converge_opts, phase_opts);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
        }
    }

    auto* converge = app.add_subcommand("converge", "run a convergence study");
    converge->add_option("--scheme", converge_opts.schemes,
                         "scheme (cip|spline|lagrange), repeatable");
    converge->add_option("--regime", converge_opts.regime, "coupled|fixed-dt|fixed-h");
    converge->add_option("--levels", converge_opts.levels,
                         "comma-separated M values (or N values for fixed-h)");
    converge->add_option("--fixed", converge_opts.fixed, "pinned dt or h for the fixed regimes");
    converge->add_option("--mtilde", converge_opts.mtilde, "Simpson half-sample count");
    converge->add_option("--out", converge_opts.out, "output CSV path");
    converge->add_flag("--full", converge_opts.full, "lift the resolution guard");

    auto* phase = app.add_subcommand("phase", "run a one-step phase sweep");
    phase->add_option("--scheme", phase_opts.schemes,
                      "scheme (cip|spline|lagrange|upwind), repeatable");
    phase->add_option("--M", phase_opts.phase_m, "spatial division number");
    phase->add_option("--mu", phase_opts.mu, "CFL number");
    phase->add_option("--out", phase_opts.out, "output CSV path");
    phase->add_option("--svg", phase_opts.svg, "output SVG path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (converge->parsed()) return run_converge_command(converge_opts);
        if (phase->parsed()) return run_phase_command(phase_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
