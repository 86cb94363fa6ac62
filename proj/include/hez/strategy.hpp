#pragma once

#include <iosfwd>
#include <vector>

#include "hez/mcverify.hpp"
#include "hez/model.hpp"
#include "hez/pde.hpp"

namespace hez {

// Optimal control fields on the solution grid plus the fixed-horizon
// constant-weight baseline.
struct StrategyField {
    Grid grid;
    std::vector<double> pi_star;       // closure field
    std::vector<double> c_tilde_star;  // closure field, strictly positive
    double baseline_pi = 0.0;
};

StrategyField make_strategy_field(const Solution& sol, const CoefficientSet& coeffs,
                                  const Preferences& prefs);

// (lambda + sigma(rho Z + rhohat Zhat)) / (gamma sigma^2) with the fields
// interpolated bilinearly; throws outside the domain closure.
double optimal_portfolio(double w, double y, const Solution& sol,
                         const CoefficientSet& coeffs, const Preferences& prefs);

// delta^psi exp(-(psi/theta) u(w, y)).
double optimal_consumption_ratio(double w, double y, const Solution& sol,
                                 const Preferences& prefs);

// lambda / gamma; defined for the Heston instance only.
double fixed_horizon_portfolio(const CoefficientSet& coeffs, const Preferences& prefs);

// Log-Euler wealth along a simulated state path, consuming pi and c_tilde
// interpolated from the strategy field; positivity is structural. Returns
// one wealth value per path record up to (and including) the exit.
std::vector<double> simulate_wealth(const StatePath& path, const StrategyField& strat,
                                    double x0, const CoefficientSet& coeffs);

// Solution CSV: w, y, u, Z, Zhat, pi_star, c_tilde_star; row-major over the
// closure with w varying fastest; 17 significant digits.
void write_solution_csv(const Solution& sol, const StrategyField& strat, std::ostream& os);

}  // namespace hez
