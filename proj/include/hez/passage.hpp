#pragma once

#include <stdexcept>

#include "hez/model.hpp"
#include "hez/pde.hpp"

namespace hez {

// Parameters of the explicit exit-time law of the return band (-L/2, L/2).
// The series is expressed in scaled time s = time_scale * t; densities are
// reported per unit physical time (Jacobian factor time_scale).
struct ExitLaw {
    HestonParams params;
    double L = 0.0;
    double mu = 0.0;          // 2 alpha m^2 / k^2
    double time_scale = 0.0;  // = alpha
    int n_terms = 64;

    double beta_n(int n) const;
    double delta_n(int n) const;   // sqrt(1 + (beta_n/L)^2)
    double eps_n(int n) const;
};

ExitLaw make_exit_law(const HestonParams& params, double L, int n_terms = 64);

struct SeriesNotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Closed-form solution of B' = -B - B^2 + (beta_n/2L)^2 with B(0) = 0.
double riccati_Bn(int n, double s, const ExitLaw& law);

// A_n(s) = mu * int_0^s B_n + eps_n * s, in closed form.
double amplitude_An(int n, double s, const ExitLaw& law);

// P(tau > t | W_0 = w, Y_0 = y), clamped to [0, 1]. Requires |w| <= L/2,
// y > 0, t >= 0.
double survival(double w, double y, double t, const ExitLaw& law);

// Density of the exit time per unit physical time; equals -d/dt survival.
double exit_density(double w, double y, double t, const ExitLaw& law);

// Exponential decay rate of the density in physical time (n = 0 term).
double tail_rate(const ExitLaw& law);

// Smallest t at which the truncated series is guaranteed to resolve for the
// given y; the exit-time mass below it is negligible.
double density_time_floor(double y, const ExitLaw& law);

enum class Verdict { verified, not_verified };

// Exponential-moment admissibility report. The verdicts compare the
// assembled growth rates against the tail rate; NotVerified means the
// (sufficient, conservatively bounded) condition could not be established.
struct MomentReport {
    double q_used = 0.0;
    double integral_1 = 0.0;
    double integral_2 = 0.0;
    double growth_rate_1 = 0.0;
    double growth_rate_2 = 0.0;
    double tail_rate = 0.0;
    bool quadrature_ok_1 = false;
    bool quadrature_ok_2 = false;
    Verdict condition_1 = Verdict::not_verified;
    Verdict condition_2 = Verdict::not_verified;
    Verdict overall() const {
        return (condition_1 == Verdict::verified && condition_2 == Verdict::verified)
                   ? Verdict::verified
                   : Verdict::not_verified;
    }
};

// Evaluates both exponential-moment expectations with int Z~^2 ds bounded by
// zhat_sq_max * tau, reducing each to a one-dimensional integral of
// exp(rate * t) against the exit density started from (w, y) = (0, m^2).
MomentReport moment_condition_check(const Preferences& prefs, const MarketConstants& constants,
                                    const SupBounds& sup, const ExitLaw& law, double q);

}  // namespace hez
