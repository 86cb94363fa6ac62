#include "hez/strategy.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "hez/generators.hpp"

namespace hez {

StrategyField make_strategy_field(const Solution& sol, const CoefficientSet& coeffs,
                                  const Preferences& prefs) {
    if (!sol.converged)
        throw std::invalid_argument("strategy: solution is not converged");
    StrategyField f;
    f.grid = sol.grid;
    f.pi_star.resize(sol.u.size());
    f.c_tilde_star.resize(sol.u.size());
    const Grid& g = sol.grid;
    const double dpsi = std::pow(prefs.delta, prefs.psi);
    for (int j = 0; j < g.nodes_y(); ++j) {
        const double y = g.y(j);
        const double lam = coeffs.lambda(y);
        const double sig = coeffs.sigma(y);
        const double rho = coeffs.rho(y);
        const double rhohat = coeffs.rhohat(y);
        for (int i = 0; i < g.nodes_w(); ++i) {
            const std::size_t n = g.idx(i, j);
            f.pi_star[n] = (lam + sig * (rho * sol.z_field[n] + rhohat * sol.zhat_field[n])) /
                           (prefs.gamma * sig * sig);
            f.c_tilde_star[n] = dpsi * std::exp(-prefs.psi / prefs.theta * sol.u[n]);
        }
    }
    f.baseline_pi = coeffs.heston ? fixed_horizon_portfolio(coeffs, prefs) : 0.0;
    return f;
}

double optimal_portfolio(double w, double y, const Solution& sol,
                         const CoefficientSet& coeffs, const Preferences& prefs) {
    const double z = interp_field(sol.z_field, sol.grid, w, y);
    const double zhat = interp_field(sol.zhat_field, sol.grid, w, y);
    const double lam = coeffs.lambda(y);
    const double sig = coeffs.sigma(y);
    return (lam + sig * (coeffs.rho(y) * z + coeffs.rhohat(y) * zhat)) /
           (prefs.gamma * sig * sig);
}

double optimal_consumption_ratio(double w, double y, const Solution& sol,
                                 const Preferences& prefs) {
    const double u = interp_field(sol.u, sol.grid, w, y);
    return std::pow(prefs.delta, prefs.psi) * std::exp(-prefs.psi / prefs.theta * u);
}

double fixed_horizon_portfolio(const CoefficientSet& coeffs, const Preferences& prefs) {
    if (!coeffs.heston)
        throw std::invalid_argument(
            "fixed_horizon_portfolio: baseline is specific to the Heston instance");
    return coeffs.heston->lambda / prefs.gamma;
}

std::vector<double> simulate_wealth(const StatePath& path, const StrategyField& strat,
                                    double x0, const CoefficientSet& coeffs) {
    if (!(x0 > 0.0)) throw std::invalid_argument("simulate_wealth: x0 must be positive");
    if (path.times.empty()) throw std::invalid_argument("simulate_wealth: empty path");
    std::vector<double> wealth;
    wealth.reserve(path.exit_index + 1);
    double log_x = std::log(x0);
    wealth.push_back(x0);
    for (std::size_t k = 0; k + 1 <= path.exit_index; ++k) {
        const double wv = path.w_values[k];
        const double yv = path.y_values[k];
        const double dt = path.times[k + 1] - path.times[k];
        const double pi = interp_field(strat.pi_star, strat.grid, wv, yv);
        const double ct = interp_field(strat.c_tilde_star, strat.grid, wv, yv);
        const double r = coeffs.r(yv);
        const double lam = coeffs.lambda(yv);
        const double sig = coeffs.sigma(yv);
        // The W^rho increment is recovered from the zero-mean-return move.
        const double d_wrho = (path.w_values[k + 1] - wv) / coeffs.gamma_w(wv, yv);
        log_x += (r + pi * lam - ct - pi * pi * sig * sig / 2.0) * dt + pi * sig * d_wrho;
        wealth.push_back(std::exp(log_x));
    }
    return wealth;
}

void write_solution_csv(const Solution& sol, const StrategyField& strat, std::ostream& os) {
    const Grid& g = sol.grid;
    os << "w,y,u,Z,Zhat,pi_star,c_tilde_star\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << sep;
    };
    for (int j = 0; j < g.nodes_y(); ++j)
        for (int i = 0; i < g.nodes_w(); ++i) {
            const std::size_t n = g.idx(i, j);
            put(g.w(i), ',');
            put(g.y(j), ',');
            put(sol.u[n], ',');
            put(sol.z_field[n], ',');
            put(sol.zhat_field[n], ',');
            put(strat.pi_star[n], ',');
            put(strat.c_tilde_star[n], '\n');
        }
}

}  // namespace hez
