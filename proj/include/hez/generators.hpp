#pragma once

#include <cstdint>

#include "hez/model.hpp"

namespace hez {

// One evaluation point of the quadratic-exponential generator, carrying the
// y-frozen coefficient values and the helper scalars M, Mhat, h.
struct GeneratorInputs {
    double d;     // decomposition value
    double z;     // first-noise loading
    double zhat;  // second-noise loading
    double y;
    double r;
    double lambda;
    double sigma;
    double rho;
    double rhohat;
    double M;     // 1 + ((1-gamma)/gamma) rho^2
    double Mhat;  // 1 + ((1-gamma)/gamma) rhohat^2
    double h;     // (1-gamma)(r + lambda^2/(2 gamma sigma^2))
};

GeneratorInputs make_generator_inputs(double d, double z, double zhat, double y,
                                      const CoefficientSet& coeffs,
                                      const Preferences& prefs);

// Epstein-Zin aggregator, second closed form. Requires c >= 0 and v <= 0.
double aggregator_f(double c, double v, const Preferences& prefs);

// Transformed generator delta*theta*exp(-delta t)*c^{1-1/psi}*y|y|^{-1/theta};
// decreasing in y for y > 0.
double transformed_F(double t, double c, double y, const Preferences& prefs);

// Post-optimization generator of the decomposition process.
double generator_H(const GeneratorInputs& in, const Preferences& prefs);

// The expression inside both infima, before optimizing over (pi, c_tilde).
double bellman_infimand(double pi, double c_tilde, const GeneratorInputs& in,
                        const Preferences& prefs);

// Linear-growth truncation of the exponential: equals exp(-(psi/theta)d) for
// d <= n and continues with the tangent-matching linear branch above n.
double truncation_J(double d, double n, const Preferences& prefs);

// generator_H with the exponential replaced by truncation_J at level n.
double truncated_Hn(double n, const GeneratorInputs& in, const Preferences& prefs);

// Dominating generator 3(z^2+zhat^2)/2 - delta^psi d + C1.
double upper_bound_H(double d, double z, double zhat, const MarketConstants& mc,
                     const Preferences& prefs);

// Elliptic-problem generator G(y, d, z, zhat) with y-only coefficients.
double pde_generator_G(double y, double d, double z, double zhat,
                       const CoefficientSet& coeffs, const Preferences& prefs);

// Lipschitz replacement of the exponential on [-c_bar, c_bar], linear with
// unit slope outside.
double phi_truncation(double d, double c_bar, const Preferences& prefs);
double phi_truncation_slope(double d, double c_bar, const Preferences& prefs);

// G with the exponential replaced by phi_truncation at level c_bar, and its
// partial derivatives (used by the Newton solver).
double pde_generator_G_phi(double y, double d, double z, double zhat, double c_bar,
                           const CoefficientSet& coeffs, const Preferences& prefs);
double pde_generator_G_phi_d(double y, double d, double c_bar,
                             const CoefficientSet& coeffs, const Preferences& prefs);
double pde_generator_G_phi_z(double y, double z, double zhat,
                             const CoefficientSet& coeffs, const Preferences& prefs);
double pde_generator_G_phi_zhat(double y, double z, double zhat,
                                const CoefficientSet& coeffs, const Preferences& prefs);

// Exponentials are evaluated after clamping the argument to +-700; every
// clamp event increments this process-wide counter.
std::uint64_t exp_clamp_count();
void reset_exp_clamp_count();

}  // namespace hez
