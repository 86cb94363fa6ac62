#include "hez/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hez {

Preferences make_preferences(double gamma, double psi, double delta) {
    if (!(gamma > 1.0))
        throw std::invalid_argument("preferences: gamma must exceed 1, got " + std::to_string(gamma));
    if (!(psi > 1.0))
        throw std::invalid_argument("preferences: psi must exceed 1, got " + std::to_string(psi));
    if (!(delta > 0.0))
        throw std::invalid_argument("preferences: delta must be positive, got " + std::to_string(delta));
    Preferences p;
    p.gamma = gamma;
    p.psi = psi;
    p.delta = delta;
    p.theta = (1.0 - gamma) / (1.0 - 1.0 / psi);
    p.p_plus = 2.0 * (1.0 - 1.0 / psi);
    p.p_minus = 2.0 * (2.0 - 1.0 / p.theta) * (1.0 - gamma);
    return p;
}

HestonParams make_heston_params(double alpha, double k2, double m2, double r,
                                double lambda, double eps, double rho) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("heston: alpha must be positive, got " + std::to_string(alpha));
    if (!(k2 > 0.0))
        throw std::invalid_argument("heston: k2 must be positive, got " + std::to_string(k2));
    if (!(m2 > 0.0))
        throw std::invalid_argument("heston: m2 must be positive, got " + std::to_string(m2));
    if (!(eps >= 0.0))
        throw std::invalid_argument("heston: eps must be nonnegative, got " + std::to_string(eps));
    if (rho != 0.0)
        throw std::invalid_argument("heston: rho must be 0 for this instance, got " + std::to_string(rho));
    return HestonParams{alpha, std::sqrt(k2), m2, r, lambda, eps, rho};
}

bool validate_feller(const HestonParams& p) {
    if (!(p.alpha > 0.0))
        throw std::invalid_argument("heston: alpha must be positive");
    return 2.0 * p.alpha * p.m2 > p.k * p.k;
}

RectDomain make_rect_domain(double L, double y1, double y2) {
    if (!(L > 0.0))
        throw std::invalid_argument("domain: L must be positive, got " + std::to_string(L));
    if (!(y1 > 0.0) || !(y1 < y2))
        throw std::invalid_argument("domain: need 0 < y1 < y2, got y1 = " + std::to_string(y1) +
                                    ", y2 = " + std::to_string(y2));
    return RectDomain{L, y1, y2};
}

CoefficientSet heston_coefficients(const HestonParams& p) {
    CoefficientSet c;
    c.r = [r = p.r](double) { return r; };
    c.lambda = [lam = p.lambda, eps = p.eps](double y) { return lam * (y + eps); };
    c.sigma = [eps = p.eps](double y) { return std::sqrt(y + eps); };
    c.rho = [](double) { return 0.0; };
    c.rhohat = [](double) { return 1.0; };
    c.a = [alpha = p.alpha, m2 = p.m2](double y) { return -alpha * (y - m2); };
    c.b = [k = p.k](double y) { return k * std::sqrt(y); };
    c.alpha_w = [](double, double) { return 0.0; };
    c.beta_w = [](double, double) { return 0.0; };
    c.gamma_w = [eps = p.eps](double, double y) { return std::sqrt(y + eps); };
    c.heston = p;
    return c;
}

MarketConstants market_constants(const CoefficientSet& coeffs, const RectDomain& domain,
                                 const Preferences& prefs) {
    MarketConstants mc;
    if (coeffs.heston) {
        // (lambda/sigma)^2 = lambda^2 (y+eps), increasing in y.
        const HestonParams& p = *coeffs.heston;
        mc.c_lam_sig = p.lambda * p.lambda * (domain.y2 + p.eps);
        mc.r_bar = p.r;
        mc.r_under = p.r;
    } else {
        const int n = 1024;
        double cls = 0.0;
        double rb = -std::numeric_limits<double>::infinity();
        double ru = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= n; ++i) {
            const double y = domain.y1 + (domain.y2 - domain.y1) * i / n;
            const double ls = coeffs.lambda(y) / coeffs.sigma(y);
            const double rv = coeffs.r(y);
            if (!std::isfinite(ls) || !std::isfinite(rv))
                throw std::runtime_error("market_constants: non-finite coefficient at y = " +
                                         std::to_string(y));
            cls = std::max(cls, ls * ls);
            rb = std::max(rb, rv);
            ru = std::min(ru, rv);
        }
        mc.c_lam_sig = cls;
        mc.r_bar = rb;
        mc.r_under = ru;
    }
    if (!std::isfinite(mc.c_lam_sig) || !std::isfinite(mc.r_bar) || !std::isfinite(mc.r_under))
        throw std::runtime_error("market_constants: non-finite supremum over the domain");

    const double g = prefs.gamma;
    mc.c1 = (1.0 - g) * (mc.r_under - prefs.delta / (1.0 - 1.0 / prefs.psi));
    if (g > 2.0)
        mc.c1 += (1.0 - g) * (2.0 - g) / (2.0 * g * g) * mc.c_lam_sig;
    return mc;
}

}  // namespace hez
