#include "hez/generators.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace hez {

namespace {

std::atomic<std::uint64_t> g_exp_clamps{0};

double safe_exp(double arg) {
    if (arg > 700.0) {
        ++g_exp_clamps;
        arg = 700.0;
    } else if (arg < -700.0) {
        ++g_exp_clamps;
        arg = -700.0;
    }
    return std::exp(arg);
}

}  // namespace

std::uint64_t exp_clamp_count() { return g_exp_clamps.load(); }
void reset_exp_clamp_count() { g_exp_clamps.store(0); }

GeneratorInputs make_generator_inputs(double d, double z, double zhat, double y,
                                      const CoefficientSet& coeffs,
                                      const Preferences& prefs) {
    GeneratorInputs in;
    in.d = d;
    in.z = z;
    in.zhat = zhat;
    in.y = y;
    in.r = coeffs.r(y);
    in.lambda = coeffs.lambda(y);
    in.sigma = coeffs.sigma(y);
    in.rho = coeffs.rho(y);
    in.rhohat = coeffs.rhohat(y);
    const double g = prefs.gamma;
    in.M = 1.0 + (1.0 - g) / g * in.rho * in.rho;
    in.Mhat = 1.0 + (1.0 - g) / g * in.rhohat * in.rhohat;
    in.h = (1.0 - g) * (in.r + in.lambda * in.lambda / (2.0 * g * in.sigma * in.sigma));
    return in;
}

double aggregator_f(double c, double v, const Preferences& prefs) {
    if (!(c >= 0.0))
        throw std::invalid_argument("aggregator_f: consumption must be nonnegative");
    if (v > 0.0)
        throw std::domain_error("aggregator_f: utility value must be nonpositive");
    const double one_m_ipsi = 1.0 - 1.0 / prefs.psi;
    const double base = (1.0 - prefs.gamma) * v;  // >= 0
    const double term1 =
        prefs.delta * std::pow(c, one_m_ipsi) / one_m_ipsi * std::pow(base, 1.0 - 1.0 / prefs.theta);
    return term1 - prefs.delta * prefs.theta * v;
}

double transformed_F(double t, double c, double y, const Preferences& prefs) {
    if (y == 0.0) return 0.0;
    return prefs.delta * prefs.theta * safe_exp(-prefs.delta * t) *
           std::pow(c, 1.0 - 1.0 / prefs.psi) * y * std::pow(std::fabs(y), -1.0 / prefs.theta);
}

double generator_H(const GeneratorInputs& in, const Preferences& prefs) {
    const double g = prefs.gamma;
    const double lam_sig = in.lambda / in.sigma;
    const double dpsi = std::pow(prefs.delta, prefs.psi);
    return in.M * in.z * in.z / 2.0 + in.Mhat * in.zhat * in.zhat / 2.0 +
           (1.0 - g) / g * lam_sig * (in.rho * in.z + in.rhohat * in.zhat) +
           (1.0 - g) / g * in.rho * in.rhohat * in.z * in.zhat +
           dpsi * prefs.theta / prefs.psi * safe_exp(-prefs.psi / prefs.theta * in.d) + in.h -
           prefs.delta * prefs.theta;
}

double bellman_infimand(double pi, double c_tilde, const GeneratorInputs& in,
                        const Preferences& prefs) {
    if (!(c_tilde >= 0.0))
        throw std::invalid_argument("bellman_infimand: c_tilde must be nonnegative");
    const double g = prefs.gamma;
    const double consumption = -(1.0 - g) * c_tilde +
                               prefs.delta * prefs.theta * std::pow(c_tilde, 1.0 - 1.0 / prefs.psi) *
                                   safe_exp(-in.d / prefs.theta);
    const double portfolio =
        (1.0 - g) * pi * (in.lambda + in.sigma * (in.rho * in.z + in.rhohat * in.zhat)) -
        g * (1.0 - g) / 2.0 * pi * pi * in.sigma * in.sigma;
    return (1.0 - g) * in.r + (in.z * in.z + in.zhat * in.zhat) / 2.0 -
           prefs.delta * prefs.theta + consumption + portfolio;
}

double truncation_J(double d, double n, const Preferences& prefs) {
    const double x = -prefs.psi / prefs.theta;  // > 0
    if (d <= n) return safe_exp(x * d);
    return safe_exp(x * n) + x * (d - n);
}

double truncated_Hn(double n, const GeneratorInputs& in, const Preferences& prefs) {
    if (!(n > 0.0)) throw std::invalid_argument("truncated_Hn: n must be positive");
    const double g = prefs.gamma;
    const double lam_sig = in.lambda / in.sigma;
    const double dpsi = std::pow(prefs.delta, prefs.psi);
    return in.M * in.z * in.z / 2.0 + in.Mhat * in.zhat * in.zhat / 2.0 +
           (1.0 - g) / g * lam_sig * (in.rho * in.z + in.rhohat * in.zhat) +
           (1.0 - g) / g * in.rho * in.rhohat * in.z * in.zhat +
           dpsi * prefs.theta / prefs.psi * truncation_J(in.d, n, prefs) + in.h -
           prefs.delta * prefs.theta;
}

double upper_bound_H(double d, double z, double zhat, const MarketConstants& mc,
                     const Preferences& prefs) {
    return 3.0 * (z * z + zhat * zhat) / 2.0 - std::pow(prefs.delta, prefs.psi) * d + mc.c1;
}

double pde_generator_G(double y, double d, double z, double zhat,
                       const CoefficientSet& coeffs, const Preferences& prefs) {
    const double g = prefs.gamma;
    const double rho = coeffs.rho(y);
    const double rhohat = coeffs.rhohat(y);
    const double lam = coeffs.lambda(y);
    const double sig = coeffs.sigma(y);
    const double dpsi = std::pow(prefs.delta, prefs.psi);
    return (1.0 + (1.0 - g) / g * rho * rho) * z * z / 2.0 +
           (1.0 + (1.0 - g) / g * rhohat * rhohat) * zhat * zhat / 2.0 +
           (1.0 - g) * lam / (g * sig) * rho * z + (1.0 - g) * lam / (g * sig) * rhohat * zhat +
           (1.0 - g) / g * rho * rhohat * z * zhat +
           dpsi * prefs.theta / prefs.psi * safe_exp(-prefs.psi / prefs.theta * d) +
           (1.0 - g) * (coeffs.r(y) + lam * lam / (2.0 * g * sig * sig)) -
           prefs.delta * prefs.theta;
}

double phi_truncation(double d, double c_bar, const Preferences& prefs) {
    if (!(c_bar > 0.0)) throw std::invalid_argument("phi_truncation: c_bar must be positive");
    const double x = -prefs.psi / prefs.theta;
    if (d > c_bar) return d + (safe_exp(x * c_bar) - c_bar);
    if (d < -c_bar) return d + (safe_exp(-x * c_bar) + c_bar);
    return safe_exp(x * d);
}

double phi_truncation_slope(double d, double c_bar, const Preferences& prefs) {
    const double x = -prefs.psi / prefs.theta;
    if (d > c_bar || d < -c_bar) return 1.0;
    return x * safe_exp(x * d);
}

double pde_generator_G_phi(double y, double d, double z, double zhat, double c_bar,
                           const CoefficientSet& coeffs, const Preferences& prefs) {
    const double g = prefs.gamma;
    const double rho = coeffs.rho(y);
    const double rhohat = coeffs.rhohat(y);
    const double lam = coeffs.lambda(y);
    const double sig = coeffs.sigma(y);
    const double dpsi = std::pow(prefs.delta, prefs.psi);
    return (1.0 + (1.0 - g) / g * rho * rho) * z * z / 2.0 +
           (1.0 + (1.0 - g) / g * rhohat * rhohat) * zhat * zhat / 2.0 +
           (1.0 - g) * lam / (g * sig) * rho * z + (1.0 - g) * lam / (g * sig) * rhohat * zhat +
           (1.0 - g) / g * rho * rhohat * z * zhat +
           dpsi * prefs.theta / prefs.psi * phi_truncation(d, c_bar, prefs) +
           (1.0 - g) * (coeffs.r(y) + lam * lam / (2.0 * g * sig * sig)) -
           prefs.delta * prefs.theta;
}

double pde_generator_G_phi_d(double y, double d, double c_bar,
                             const CoefficientSet& coeffs, const Preferences& prefs) {
    (void)y;
    (void)coeffs;
    return std::pow(prefs.delta, prefs.psi) * prefs.theta / prefs.psi *
           phi_truncation_slope(d, c_bar, prefs);
}

double pde_generator_G_phi_z(double y, double z, double zhat,
                             const CoefficientSet& coeffs, const Preferences& prefs) {
    const double g = prefs.gamma;
    const double rho = coeffs.rho(y);
    const double rhohat = coeffs.rhohat(y);
    return (1.0 + (1.0 - g) / g * rho * rho) * z +
           (1.0 - g) * coeffs.lambda(y) / (g * coeffs.sigma(y)) * rho +
           (1.0 - g) / g * rho * rhohat * zhat;
}

double pde_generator_G_phi_zhat(double y, double z, double zhat,
                                const CoefficientSet& coeffs, const Preferences& prefs) {
    const double g = prefs.gamma;
    const double rho = coeffs.rho(y);
    const double rhohat = coeffs.rhohat(y);
    return (1.0 + (1.0 - g) / g * rhohat * rhohat) * zhat +
           (1.0 - g) * coeffs.lambda(y) / (g * coeffs.sigma(y)) * rhohat +
           (1.0 - g) / g * rho * rhohat * z;
}

}  // namespace hez
