// Command-line front end: solve | density | check-assumption | verify |
// strategy-export, driven by an INI config whose defaults reproduce the
// reference experiment.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hez/config.hpp"
#include "hez/generators.hpp"
#include "hez/mcverify.hpp"
#include "hez/model.hpp"
#include "hez/passage.hpp"
#include "hez/pde.hpp"
#include "hez/strategy.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace hez;

namespace {

struct Probe {
    double w;
    double y;
};

struct Cli {
    std::string config_path;
    std::string out_dir;
    long long seed_override = -1;
    std::vector<std::string> probe_args;
    double w0 = 0.0;
    double y0 = -1.0;  // default: m2
    double t_max = -1.0;
    int n_points = 400;
};

RunConfig load_config(const Cli& cli) {
    RunConfig cfg = cli.config_path.empty() ? RunConfig{} : parse_config_file(cli.config_path);
    if (!cli.out_dir.empty()) cfg.output.directory = cli.out_dir;
    if (cli.seed_override >= 0) cfg.mc.seed = static_cast<std::uint64_t>(cli.seed_override);
    return cfg;
}

void warn_feller(const HestonParams& hp) {
    if (!validate_feller(hp)) {
        std::cerr << "warning: Feller condition 2*alpha*m2 > k^2 fails ("
                  << 2.0 * hp.alpha * hp.m2 << " <= " << hp.k * hp.k
                  << "); proceeding with full-truncation simulation and y1 > 0\n";
    }
}

std::vector<Probe> resolve_probes(const Cli& cli, const RunConfig& cfg) {
    std::vector<Probe> probes;
    for (const std::string& s : cli.probe_args) {
        const auto comma = s.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("--probe expects 'w,y', got '" + s + "'");
        probes.push_back({std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))});
    }
    if (probes.empty()) {
        const double L = cfg.domain.L, m2 = cfg.market.m2;
        const double mid = (cfg.domain.y1 + cfg.domain.y2) / 2.0;
        probes = {{0.0, 0.04}, {L / 4.0, m2}, {-L / 4.0, m2}, {0.0, 0.1}, {L / 8.0, mid}};
        std::erase_if(probes, [&](const Probe& p) {
            return !(p.y > cfg.domain.y1 && p.y < cfg.domain.y2 && std::fabs(p.w) < L / 2.0);
        });
    }
    return probes;
}

Solution solve_from_config(const RunConfig& cfg, const CoefficientSet& coeffs,
                           const Preferences& prefs) {
    const Grid grid = build_grid(config_domain(cfg), cfg.solver.nw, cfg.solver.ny);
    return solve_dirichlet_auto(grid, coeffs, prefs, config_solver_options(cfg));
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

json solution_summary(const Solution& sol, const HestonParams& hp) {
    json j;
    j["c_tilde_sup"] = sol.c_tilde_sup;
    j["zhat_sq_max"] = sol.zhat_sq_max;
    j["residual_norm"] = sol.residual_norm;
    j["iterations"] = sol.iterations;
    j["c_bar_used"] = sol.c_bar_used;
    j["grid"] = {{"nw", sol.grid.nw}, {"ny", sol.grid.ny}};
    j["feller_ok"] = validate_feller(hp);
    j["exp_clamp_events"] = exp_clamp_count();
    return j;
}

int cmd_solve(const Cli& cli, bool csv_only) {
    const RunConfig cfg = load_config(cli);
    const Preferences prefs = config_preferences(cfg);
    const HestonParams hp = config_heston(cfg);
    warn_feller(hp);
    const CoefficientSet coeffs = heston_coefficients(hp);
    reset_exp_clamp_count();
    const Solution sol = solve_from_config(cfg, coeffs, prefs);
    const StrategyField strat = make_strategy_field(sol, coeffs, prefs);

    const fs::path dir(cfg.output.directory);
    fs::create_directories(dir);
    std::ofstream csv(dir / "solution.csv", std::ios::binary);
    write_solution_csv(sol, strat, csv);
    csv.close();
    std::cout << "wrote " << (dir / "solution.csv").string() << "\n";
    if (!csv_only) {
        write_text(dir / "summary.json", solution_summary(sol, hp).dump(2) + "\n");
        std::cout << "wrote " << (dir / "summary.json").string() << "\n";
        std::cout << "c_tilde_sup = " << sol.c_tilde_sup
                  << ", zhat_sq_max = " << sol.zhat_sq_max
                  << ", iterations = " << sol.iterations << "\n";
    }
    return 0;
}

int cmd_density(const Cli& cli) {
    const RunConfig cfg = load_config(cli);
    const HestonParams hp = config_heston(cfg);
    warn_feller(hp);
    const ExitLaw law = make_exit_law(hp, cfg.domain.L);
    const double y0 = cli.y0 > 0.0 ? cli.y0 : cfg.market.m2;
    const double half = cfg.domain.L / 2.0;
    if (!(std::fabs(cli.w0) < half))
        throw std::invalid_argument("density: w0 must lie strictly inside the band");
    const double t_max = cli.t_max > 0.0 ? cli.t_max : 12.0 / tail_rate(law);
    const int n = std::max(cli.n_points, 8);

    std::string out;
    out += "t,survival,density\n";
    char buf[128];
    double integral = 0.0, prev_density = 0.0, prev_t = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = t_max * i / (n - 1);
        const double sv = survival(cli.w0, y0, t, law);
        const double de = exit_density(cli.w0, y0, t, law);
        if (i > 0) integral += 0.5 * (prev_density + de) * (t - prev_t);
        prev_density = de;
        prev_t = t;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, sv, de);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "# trapezoid integral of density = %.17g\n", integral);
    out += buf;

    const fs::path dir(cfg.output.directory);
    fs::create_directories(dir);
    write_text(dir / "density.csv", out);
    std::cout << "wrote " << (dir / "density.csv").string()
              << " (integral = " << integral << ")\n";
    return 0;
}

int cmd_check_assumption(const Cli& cli) {
    const RunConfig cfg = load_config(cli);
    const Preferences prefs = config_preferences(cfg);
    const HestonParams hp = config_heston(cfg);
    warn_feller(hp);
    const CoefficientSet coeffs = heston_coefficients(hp);
    const Solution sol = solve_from_config(cfg, coeffs, prefs);
    const SupBounds sup = sup_bounds(sol);
    const MarketConstants mc = market_constants(coeffs, config_domain(cfg), prefs);
    const ExitLaw law = make_exit_law(hp, cfg.domain.L);

    json reports = json::array();
    bool any_verified = false;
    for (double q : cfg.assumption.q_ladder) {
        const MomentReport rep = moment_condition_check(prefs, mc, sup, law, q);
        json j;
        j["q_used"] = rep.q_used;
        j["growth_rate_1"] = rep.growth_rate_1;
        j["growth_rate_2"] = rep.growth_rate_2;
        j["tail_rate"] = rep.tail_rate;
        j["integral_1"] = std::isfinite(rep.integral_1) ? json(rep.integral_1) : json("infinite");
        j["integral_2"] = std::isfinite(rep.integral_2) ? json(rep.integral_2) : json("infinite");
        j["condition_1"] = rep.condition_1 == Verdict::verified ? "Verified" : "NotVerified";
        j["condition_2"] = rep.condition_2 == Verdict::verified ? "Verified" : "NotVerified";
        j["overall"] = rep.overall() == Verdict::verified ? "Verified" : "NotVerified";
        reports.push_back(j);
        if (rep.overall() == Verdict::verified) any_verified = true;
    }
    json out;
    out["c_tilde_sup"] = sup.c_tilde_sup;
    out["zhat_sq_max"] = sup.zhat_sq_max;
    out["reports"] = reports;
    out["overall"] = any_verified ? "Verified" : "NotVerified";

    const fs::path dir(cfg.output.directory);
    fs::create_directories(dir);
    write_text(dir / "assumption.json", out.dump(2) + "\n");
    std::cout << "wrote " << (dir / "assumption.json").string() << "\n";
    std::cout << "overall: " << (any_verified ? "Verified" : "NotVerified") << "\n";
    return 0;
}

int cmd_verify(const Cli& cli) {
    const RunConfig cfg = load_config(cli);
    const Preferences prefs = config_preferences(cfg);
    const HestonParams hp = config_heston(cfg);
    warn_feller(hp);
    const CoefficientSet coeffs = heston_coefficients(hp);
    const RectDomain dom = config_domain(cfg);
    const std::vector<Probe> probes = resolve_probes(cli, cfg);
    if (probes.empty()) throw std::invalid_argument("verify: no valid probes");

    const Solution sol = solve_from_config(cfg, coeffs, prefs);
    const ExitLaw law = make_exit_law(hp, cfg.domain.L);

    json out;
    bool all_pass = true;
    bool conclusive = cfg.mc.n_paths >= 10000;

    // exit-law comparison at the first probe
    const Probe ks_probe = probes.front();
    if (conclusive) {
        const auto samples = sample_exit_times(cfg.mc.n_paths, ks_probe.w, ks_probe.y, hp, dom,
                                               ExitRegion::band, cfg.mc.dt, cfg.mc.seed);
        const double ks = empirical_vs_series(samples, law, ks_probe.w, ks_probe.y);
        out["ks_distance"] = ks;
        out["ks_threshold"] = 0.01;
        if (ks > 0.01) all_pass = false;
    } else {
        out["ks_distance"] = nullptr;
    }
    out["n_paths"] = cfg.mc.n_paths;
    out["dt"] = cfg.mc.dt;

    // Feynman-Kac gate with a two-level dt probe for the bias allowance
    const std::size_t n_fk = std::max<std::size_t>(cfg.mc.n_paths / 5, 200);
    json fk_list = json::array();
    for (const Probe& p : probes) {
        const FkResult coarse = feynman_kac_check(sol, hp, dom, p.w, p.y, n_fk / 2,
                                                  4.0 * cfg.mc.dt, cfg.mc.seed + 1, prefs);
        const FkResult fine = feynman_kac_check(sol, hp, dom, p.w, p.y, n_fk, cfg.mc.dt,
                                                cfg.mc.seed + 2, prefs);
        const double slope = std::max(
            0.0, (std::fabs(coarse.fk_residual) - std::fabs(fine.fk_residual)) /
                     (3.0 * cfg.mc.dt));
        const double allowance = 3.0 * fine.fk_stderr + slope * cfg.mc.dt + 1e-12;
        const bool pass = fine.fk_residual <= allowance;
        if (conclusive && !pass) all_pass = false;
        json j;
        j["w"] = p.w;
        j["y"] = p.y;
        j["u"] = fine.u_value;
        j["mc_mean"] = fine.mc_mean;
        j["fk_residual"] = fine.fk_residual;
        j["fk_stderr"] = fine.fk_stderr;
        j["allowance"] = allowance;
        j["pass"] = pass;
        fk_list.push_back(j);
    }
    out["feynman_kac"] = fk_list;

    const auto faces = exit_face_frequencies(std::min<std::size_t>(cfg.mc.n_paths, 4000),
                                             ks_probe.w, ks_probe.y, hp, dom, cfg.mc.dt,
                                             cfg.mc.seed + 3);
    out["exit_face_freq"] = {{"w_minus", faces[0]},
                             {"w_plus", faces[1]},
                             {"y_minus", faces[2]},
                             {"y_plus", faces[3]}};
    out["verdict"] = !conclusive ? "Inconclusive" : (all_pass ? "Pass" : "Fail");

    const fs::path dir(cfg.output.directory);
    fs::create_directories(dir);
    write_text(dir / "verify.json", out.dump(2) + "\n");
    std::cout << "wrote " << (dir / "verify.json").string() << "\n";
    std::cout << "verdict: " << out["verdict"].get<std::string>() << "\n";
    return (!conclusive || all_pass) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-horizon consumption-investment solver and verification harness"};
    app.require_subcommand(1);

    Cli cli;
    app.add_option("--config", cli.config_path, "configuration file (INI sections)");
    app.add_option("--out", cli.out_dir, "output directory (overrides output.directory)");
    app.add_option("--seed", cli.seed_override, "seed override");
    app.add_option("--probe", cli.probe_args, "probe point 'w,y' (repeatable)");

    auto* solve = app.add_subcommand("solve", "solve the elliptic problem, export fields");
    auto* density = app.add_subcommand("density", "tabulate survival and exit density");
    density->add_option("--w0", cli.w0, "density probe w");
    density->add_option("--y0", cli.y0, "density probe y (default: long-run variance)");
    density->add_option("--t-max", cli.t_max, "last tabulated time");
    density->add_option("--n-points", cli.n_points, "number of rows");
    auto* checka = app.add_subcommand("check-assumption",
                                      "exponential-moment admissibility check over the q ladder");
    auto* verify = app.add_subcommand("verify", "Monte Carlo verification report");
    auto* strat = app.add_subcommand("strategy-export", "solution CSV with strategy columns");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(cli, false);
        if (density->parsed()) return cmd_density(cli);
        if (checka->parsed()) return cmd_check_assumption(cli);
        if (verify->parsed()) return cmd_verify(cli);
        if (strat->parsed()) return cmd_solve(cli, true);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
