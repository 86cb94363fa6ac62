#pragma once

#include <functional>
#include <optional>

namespace hez {

// Epstein-Zin preference parameters together with the derived exponents
// used throughout the solver. Immutable after construction.
struct Preferences {
    double gamma;    // relative risk aversion, > 1
    double psi;      // elasticity of intertemporal substitution, > 1
    double delta;    // subjective discount rate, > 0
    double theta;    // (1-gamma)/(1-1/psi), negative in this regime
    double p_plus;   // 2(1-1/psi), in (0,2)
    double p_minus;  // 2(2-1/theta)(1-gamma), negative
};

// Throws std::invalid_argument naming the violated bound.
Preferences make_preferences(double gamma, double psi, double delta);

// State/market parameters of the (eps-modified) Heston instance. The risky
// asset's excess drift is lambda*(Y+eps) and its volatility sqrt(Y+eps).
struct HestonParams {
    double alpha;   // mean-reversion speed of Y
    double k;       // vol-of-vol
    double m2;      // long-run variance
    double r;       // riskfree rate
    double lambda;  // excess-return slope
    double eps;     // epsilon-modification, >= 0
    double rho;     // correlation between the two noises, 0 here
};

HestonParams make_heston_params(double alpha, double k2, double m2, double r,
                                double lambda, double eps, double rho = 0.0);

// True iff 2*alpha*m^2 > k^2. The reference parameter set violates this;
// callers warn and proceed (the CIR scheme is truncation-robust and the PDE
// domain is bounded away from y = 0).
bool validate_feller(const HestonParams& p);

// Solve rectangle: w in (-L/2, L/2), y in (y1, y2).
struct RectDomain {
    double L;
    double y1;
    double y2;
};

RectDomain make_rect_domain(double L, double y1, double y2);

// Market and state coefficients. All y-only per the Markovian setting; the
// W-process drift/loadings may depend on (w, y).
struct CoefficientSet {
    std::function<double(double)> r;
    std::function<double(double)> lambda;
    std::function<double(double)> sigma;
    std::function<double(double)> rho;
    std::function<double(double)> rhohat;
    std::function<double(double)> a;  // drift of Y
    std::function<double(double)> b;  // diffusion of Y
    std::function<double(double, double)> alpha_w;  // drift of W
    std::function<double(double, double)> beta_w;   // dW loading of W
    std::function<double(double, double)> gamma_w;  // dWhat loading of W
    std::optional<HestonParams> heston;  // set when built by heston_coefficients
};

CoefficientSet heston_coefficients(const HestonParams& p);

// Scalar constants entering the dominating generator and the exponential
// moment conditions.
struct MarketConstants {
    double c_lam_sig;  // sup over the domain closure of (lambda/sigma)^2
    double r_bar;      // sup r
    double r_under;    // inf r
    double c1;         // constant term of the dominating generator
};

// Suprema use analytic monotonicity for the Heston instance and a dense-grid
// scan (1024 intervals, endpoints included) otherwise.
MarketConstants market_constants(const CoefficientSet& coeffs,
                                 const RectDomain& domain,
                                 const Preferences& prefs);

}  // namespace hez
