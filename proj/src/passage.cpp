#include "hez/passage.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

namespace hez {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesTol = 1e-12;  // absolute tail tolerance for the series

double bracket_term(int n, double s, double y, const ExitLaw& law) {
    // (2a/k^2)(m^2 - y) B_n + (2a/k^2) y ((beta_n/2L)^2 - B_n^2) + eps_n
    const double k2 = law.params.k * law.params.k;
    const double two_a_k2 = 2.0 * law.params.alpha / k2;
    const double B = riccati_Bn(n, s, law);
    const double bh = law.beta_n(n) / (2.0 * law.L);
    return two_a_k2 * (law.params.m2 - y) * B + two_a_k2 * y * (bh * bh - B * B) +
           law.eps_n(n);
}

}  // namespace

double ExitLaw::beta_n(int n) const {
    return params.k / params.alpha * (2.0 * n + 1.0) * kPi;
}

double ExitLaw::delta_n(int n) const {
    const double ratio = beta_n(n) / L;
    return std::sqrt(1.0 + ratio * ratio);
}

double ExitLaw::eps_n(int n) const {
    const double x = (2.0 * n + 1.0) * kPi / (std::sqrt(2.0 * params.alpha) * L);
    return x * x * params.eps;
}

ExitLaw make_exit_law(const HestonParams& params, double L, int n_terms) {
    if (!(L > 0.0)) throw std::invalid_argument("exit_law: L must be positive");
    if (n_terms < 1) throw std::invalid_argument("exit_law: n_terms must be at least 1");
    ExitLaw law;
    law.params = params;
    law.L = L;
    law.mu = 2.0 * params.alpha * params.m2 / (params.k * params.k);
    law.time_scale = params.alpha;
    law.n_terms = n_terms;
    return law;
}

double riccati_Bn(int n, double s, const ExitLaw& law) {
    if (!(s >= 0.0)) throw std::invalid_argument("riccati_Bn: s must be nonnegative");
    const double D = law.delta_n(n);
    const double e = std::exp(-D * s);
    const double bh = law.beta_n(n) / (2.0 * law.L);
    return 2.0 * bh * bh * (1.0 - e) / ((D + 1.0) + (D - 1.0) * e);
}

double amplitude_An(int n, double s, const ExitLaw& law) {
    if (!(s >= 0.0)) throw std::invalid_argument("amplitude_An: s must be nonnegative");
    const double D = law.delta_n(n);
    const double e = std::exp(-D * s);
    const double k2 = law.params.k * law.params.k;
    return law.mu * std::log(((D + 1.0) + (D - 1.0) * e) / (2.0 * D)) +
           (law.params.alpha * law.params.m2 * (D - 1.0) / k2 + law.eps_n(n)) * s;
}

double survival(double w, double y, double t, const ExitLaw& law) {
    const double half = law.L / 2.0;
    if (std::fabs(w) > half + 1e-12 * law.L)
        throw std::invalid_argument("survival: |w| must not exceed L/2");
    if (!(y > 0.0)) throw std::invalid_argument("survival: y must be positive");
    if (!(t >= 0.0)) throw std::invalid_argument("survival: t must be nonnegative");
    if (t == 0.0) return std::fabs(w) >= half ? 0.0 : 1.0;

    const double s = law.time_scale * t;
    const double v = 2.0 * law.params.alpha * y / (law.params.k * law.params.k);
    double sum = 0.0;
    double mag = 0.0;
    for (int n = 0; n < law.n_terms; ++n) {
        const double amp = 4.0 / (kPi * (2.0 * n + 1.0)) * (n % 2 == 0 ? 1.0 : -1.0);
        const double decay = std::exp(-amplitude_An(n, s, law) - riccati_Bn(n, s, law) * v);
        mag = std::fabs(amp) * decay;
        sum += amp * decay * std::cos((2.0 * n + 1.0) * kPi * w / law.L);
        if (mag < kSeriesTol && n >= 3) break;
    }
    if (mag >= kSeriesTol)
        throw SeriesNotConverged("survival: series tail " + std::to_string(mag) +
                                 " above tolerance with n_terms = " + std::to_string(law.n_terms));
    return std::clamp(sum, 0.0, 1.0);
}

double exit_density(double w, double y, double t, const ExitLaw& law) {
    const double half = law.L / 2.0;
    if (std::fabs(w) > half + 1e-12 * law.L)
        throw std::invalid_argument("exit_density: |w| must not exceed L/2");
    if (!(y > 0.0)) throw std::invalid_argument("exit_density: y must be positive");
    if (!(t >= 0.0)) throw std::invalid_argument("exit_density: t must be nonnegative");
    if (t == 0.0) return 0.0;  // no instantaneous exit from the interior

    const double s = law.time_scale * t;
    const double v = 2.0 * law.params.alpha * y / (law.params.k * law.params.k);
    double sum = 0.0;
    double mag = 0.0;
    for (int n = 0; n < law.n_terms; ++n) {
        const double amp = 4.0 / (kPi * (2.0 * n + 1.0)) * (n % 2 == 0 ? 1.0 : -1.0);
        const double decay = std::exp(-amplitude_An(n, s, law) - riccati_Bn(n, s, law) * v);
        const double br = bracket_term(n, s, y, law);
        mag = std::fabs(amp * br) * decay;
        sum += amp * br * decay * std::cos((2.0 * n + 1.0) * kPi * w / law.L);
        if (mag < kSeriesTol && n >= 3) break;
    }
    if (mag >= kSeriesTol)
        throw SeriesNotConverged("exit_density: series tail " + std::to_string(mag) +
                                 " above tolerance with n_terms = " + std::to_string(law.n_terms));
    return law.time_scale * sum;
}

double tail_rate(const ExitLaw& law) {
    const double k2 = law.params.k * law.params.k;
    return law.time_scale *
           (law.params.alpha * law.params.m2 * (law.delta_n(0) - 1.0) / k2 + law.eps_n(0));
}

double density_time_floor(double y, const ExitLaw& law) {
    // Terms beyond the truncation must have decayed: the small-s ramp of
    // B_n v with n = n_terms dominates, B_n(s) ~ (beta_n/2L)^2 s.
    const int n = law.n_terms - 1;
    const double bh = law.beta_n(n) / (2.0 * law.L);
    const double v = 2.0 * law.params.alpha * y / (law.params.k * law.params.k);
    const double need = 46.0;  // exp(-46) ~ 1e-20 kills any polynomial prefactor
    return need / (bh * bh * v * law.time_scale);
}

namespace {

// Adaptive Simpson on [a, b].
double simpson(const std::function<double(double)>& f, double a, double m, double b,
               double fa, double fm, double fb, double whole, double tol, int depth) {
    const double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::fabs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, lm, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(f, m, rm, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = (a + b) / 2.0;
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

MomentReport moment_condition_check(const Preferences& prefs, const MarketConstants& constants,
                                    const SupBounds& sup, const ExitLaw& law, double q) {
    if (!(q > 1.0)) throw std::invalid_argument("moment_condition_check: q must exceed 1");
    if (!sup.converged)
        throw std::invalid_argument("moment_condition_check: sup bounds come from an unconverged solve");

    const double g = prefs.gamma;
    const double pp = prefs.p_plus;
    const double pm = prefs.p_minus;
    const double C = constants.c_lam_sig;
    const double zt2 = sup.zhat_sq_max;  // bound on Z~^2 (rho = 0 makes Z~ = Zhat)

    MomentReport rep;
    rep.q_used = q;
    rep.tail_rate = tail_rate(law);
    rep.growth_rate_1 =
        q * (2.0 * constants.r_bar * pp + (pp + 4.0 * pp * pp / (g * g)) * C) +
        q * 4.0 * pp * pp / (g * g) * zt2;
    rep.growth_rate_2 =
        -pm * prefs.delta / (1.0 - 1.0 / prefs.psi) + 2.0 * constants.r_under * pm -
        2.0 * pm * std::pow(prefs.delta, prefs.psi) *
            std::exp(-prefs.psi / prefs.theta * sup.c_tilde_sup) +
        (std::fabs(pm) + 4.0 * pm * pm / (g * g)) * C +
        (4.0 * pm * pm - 2.0 * pm) / (g * g) * zt2;

    // Evaluate E[exp(rate * tau)] from the band center at the long-run variance.
    const double w0 = 0.0, y0 = law.params.m2;
    auto moment_integral = [&](double rate, bool& ok) -> double {
        if (rate >= rep.tail_rate) {
            ok = false;
            return std::numeric_limits<double>::infinity();
        }
        const double net = rep.tail_rate - rate;
        const double t_lo = std::min(density_time_floor(y0, law), 0.5 / rep.tail_rate);
        std::function<double(double)> f = [&](double t) {
            return std::exp(rate * t) * exit_density(w0, y0, t, law);
        };
        double t_hi = t_lo + 20.0 / net;
        double total = 0.0, tail = 0.0;
        for (int round = 0; round < 40; ++round) {
            total = integrate(f, t_lo, t_hi, 1e-12);
            const double amp = 2.0 * f(t_hi);  // amplitude of the decaying tail at t_hi
            tail = amp / net;
            if (tail <= 1e-10 * std::max(total, 1e-300)) break;
            t_hi *= 1.5;
        }
        ok = tail <= 1e-10 * std::max(total, 1e-300);
        return total + tail;
    };

    rep.integral_1 = moment_integral(rep.growth_rate_1, rep.quadrature_ok_1);
    rep.integral_2 = moment_integral(rep.growth_rate_2, rep.quadrature_ok_2);
    rep.condition_1 = (rep.growth_rate_1 < rep.tail_rate && rep.quadrature_ok_1)
                          ? Verdict::verified
                          : Verdict::not_verified;
    rep.condition_2 = (rep.growth_rate_2 < rep.tail_rate && rep.quadrature_ok_2)
                          ? Verdict::verified
                          : Verdict::not_verified;
    return rep;
}

}  // namespace hez
