#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "hez/mcverify.hpp"
#include "hez/model.hpp"
#include "hez/passage.hpp"
#include "hez/pde.hpp"
#include "hez/rng.hpp"

using namespace hez;

namespace {

Preferences paper_prefs() { return make_preferences(2.0, 1.5, 0.08); }
HestonParams paper_market(double eps = 0.0) {
    return make_heston_params(5.0, 0.25, 0.0225, 0.05, 0.47, eps);
}
RectDomain paper_domain() { return make_rect_domain(0.02, 0.001, 1.0); }

// Market with lambda = 0 and r chosen so the gradient-free generator
// vanishes identically: the elliptic problem then has the zero solution.
HestonParams null_generator_market(const Preferences& p) {
    const double r = (p.delta * p.theta -
                      std::pow(p.delta, p.psi) * p.theta / p.psi) /
                     (1.0 - p.gamma);
    HestonParams hp{5.0, 0.5, 0.0225, r, 0.0, 0.0, 0.0};
    return hp;
}

}  // namespace

TEST_CASE("philox streams: reproducible, path-disjoint") {
    const auto a = Philox4x32::block(1, 2, 3, 4);
    const auto b = Philox4x32::block(1, 2, 3, 4);
    CHECK(a == b);
    CHECK(Philox4x32::block(1, 2, 3, 4) != Philox4x32::block(1, 3, 3, 4));
    CHECK(Philox4x32::block(1, 2, 3, 4) != Philox4x32::block(2, 2, 3, 4));
    // uniforms live in (0, 1]
    for (int i = 0; i < 1000; ++i) {
        const UniformPair u = uniform_pair(9, i, 0, 1);
        CHECK(u.first > 0.0);
        CHECK(u.first <= 1.0);
    }
    // crude moment check on the normals
    double s = 0.0, s2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const NormalPair g = normal_pair(7, i, 0, 0);
        s += g.first + g.second;
        s2 += g.first * g.first + g.second * g.second;
    }
    CHECK(std::fabs(s / (2 * n)) < 0.02);
    CHECK(std::fabs(s2 / (2 * n) - 1.0) < 0.03);
}

TEST_CASE("simulate_state: preconditions and exit contracts") {
    const HestonParams hp = paper_market();
    const RectDomain dom = paper_domain();
    CHECK_THROWS_AS(simulate_state(0.01, 0.04, hp, dom, 1e-5, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_state(0.0, 1.0, hp, dom, 1e-5, 1), std::invalid_argument);

    const StatePath path = simulate_state(0.0, 0.04, hp, dom, 1e-5, 99);
    CHECK(path.exit_index == path.times.size() - 1);
    for (std::size_t k = 0; k < path.exit_index; ++k) {
        CHECK(std::fabs(path.w_values[k]) < dom.L / 2.0);
        CHECK(path.y_values[k] > dom.y1);
        CHECK(path.y_values[k] < dom.y2);
    }
    const double we = path.w_values[path.exit_index];
    const double ye = path.y_values[path.exit_index];
    const bool on_w = std::fabs(std::fabs(we) - dom.L / 2.0) < 1e-14;
    const bool on_y = std::fabs(ye - dom.y1) < 1e-14 || std::fabs(ye - dom.y2) < 1e-14;
    CHECK((on_w || on_y));

    // determinism in the seed
    const StatePath again = simulate_state(0.0, 0.04, hp, dom, 1e-5, 99);
    CHECK(path.times == again.times);
    CHECK(path.w_values == again.w_values);
    const StatePath other = simulate_state(0.0, 0.04, hp, dom, 1e-5, 100);
    CHECK(path.times != other.times);
}

TEST_CASE("zero vol-of-vol: Y follows the deterministic relaxation") {
    // bypass the factory: k = 0 is the zero-diffusion oracle case
    HestonParams hp{5.0, 0.0, 0.0225, 0.05, 0.0, 0.0, 0.0};
    const RectDomain dom = paper_domain();
    const double y0 = 0.002;
    const StatePath path = simulate_state(0.0, y0, hp, dom, 1e-6, 4);
    for (std::size_t k = 0; k < std::min<std::size_t>(200, path.exit_index); ++k) {
        const double t = path.times[k];
        const double exact = hp.m2 + (y0 - hp.m2) * std::exp(-hp.alpha * t);
        CHECK(std::fabs(path.y_values[k] - exact) < 1e-8);
    }
}

TEST_CASE("exit faces are w-symmetric from the band center") {
    const auto freq = exit_face_frequencies(4000, 0.0, 0.0225, paper_market(),
                                            paper_domain(), 1e-5, 2024);
    const double p_minus = freq[0], p_plus = freq[1];
    const double p = (p_minus + p_plus) / 2.0;
    const double se = std::sqrt(p * (1.0 - p) / 4000.0);
    CHECK(std::fabs(p_minus - p_plus) < 2.0 * 3.0 * se + 1e-12);
    CHECK(p_minus + p_plus <= 1.0 + 1e-12);
}

TEST_CASE("rectangle exits never later than matched-seed band exits") {
    const HestonParams hp = paper_market();
    const RectDomain dom = paper_domain();
    const auto rect =
        sample_exit_times(500, 0.0, 0.0225, hp, dom, ExitRegion::rectangle, 1e-5, 77);
    const auto band = sample_exit_times(500, 0.0, 0.0225, hp, dom, ExitRegion::band, 1e-5, 77);
    bool some_strict = false;
    for (std::size_t i = 0; i < rect.size(); ++i) {
        CHECK(rect[i] <= band[i] + 1e-15);
        if (rect[i] < band[i]) some_strict = true;
    }
    CHECK(some_strict);
}

TEST_CASE("halving dt leaves the empirical mean within noise") {
    const HestonParams hp = paper_market();
    const RectDomain dom = paper_domain();
    const std::size_t n = 8000;
    const auto a = sample_exit_times(n, 0.0, 0.04, hp, dom, ExitRegion::band, 2e-5, 5150);
    const auto b = sample_exit_times(n, 0.0, 0.04, hp, dom, ExitRegion::band, 1e-5, 5151);
    auto mean_se = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= v.size();
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        return std::pair<double, double>(m, std::sqrt(ss / (v.size() - 1) / v.size()));
    };
    const auto [ma, sa] = mean_se(a);
    const auto [mb, sb] = mean_se(b);
    CHECK(std::fabs(ma - mb) < 2.0 * (sa + sb));
}

TEST_CASE("sampling is bit-stable across thread budgets") {
    const HestonParams hp = paper_market();
    const RectDomain dom = paper_domain();
    setenv("HORIZON_EZ_THREADS", "1", 1);
    const auto one = sample_exit_times(400, 0.0, 0.04, hp, dom, ExitRegion::band, 1e-5, 31);
    setenv("HORIZON_EZ_THREADS", "4", 1);
    const auto four = sample_exit_times(400, 0.0, 0.04, hp, dom, ExitRegion::band, 1e-5, 31);
    unsetenv("HORIZON_EZ_THREADS");
    CHECK(one == four);
}

TEST_CASE("empirical CDF against the series: ideal sample and negative control") {
    const ExitLaw law = make_exit_law(paper_market(), 0.02);
    const double w0 = 0.0, y0 = 0.04;
    // ideal sample: quantiles of the series CDF via bisection
    const std::size_t n = 10000;
    std::vector<double> samples(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double target = (static_cast<double>(i) + 0.5) / n;
        double lo = 1e-6, hi = 3.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = (lo + hi) / 2.0;
            if (1.0 - survival(w0, y0, mid, law) < target) lo = mid; else hi = mid;
        }
        samples[i] = (lo + hi) / 2.0;
    }
    const double d = empirical_vs_series(samples, law, w0, y0);
    CHECK(d < 1.0 / n + 1e-6);

    // un-rescaled time convention must be loudly wrong
    ExitLaw wrong = law;
    wrong.time_scale = 1.0;
    CHECK(empirical_vs_series(samples, wrong, w0, y0) > 0.1);

    CHECK_THROWS_AS(empirical_vs_series(std::vector<double>(100, 0.1), law, w0, y0),
                    std::invalid_argument);
}

TEST_CASE("feynman-kac on the degenerate null-generator market") {
    const Preferences p = paper_prefs();
    const HestonParams hp = null_generator_market(p);
    const CoefficientSet c = heston_coefficients(hp);
    const RectDomain dom = paper_domain();
    // G(y, 0, 0, 0) vanishes identically, so the solve returns the zero field
    const Grid g = build_grid(dom, 16, 16);
    SolverOptions opts;
    const Solution sol = solve_dirichlet(g, c, p, opts);
    CHECK(sol.c_tilde_sup == doctest::Approx(0.0).epsilon(1e-12));

    const FkResult fk = feynman_kac_check(sol, hp, dom, 0.0, 0.04, 1500, 4e-5, 11, p);
    CHECK(fk.u_value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::fabs(fk.mc_mean) < 1e-10);
    CHECK(fk.fk_residual < 1e-10);
}

TEST_CASE("feynman-kac smoke test at the reference parameters") {
    const Preferences p = paper_prefs();
    const HestonParams hp = paper_market();
    const CoefficientSet c = heston_coefficients(hp);
    const RectDomain dom = paper_domain();
    SolverOptions opts;
    opts.tolerance = 1e-11;
    const Solution sol = solve_dirichlet(build_grid(dom, 65, 65), c, p, opts);
    const FkResult fk = feynman_kac_check(sol, hp, dom, 0.0, 0.04, 3000, 4e-5, 2, p);
    CHECK(fk.u_value > 0.0);
    CHECK(fk.mc_mean > 0.0);  // independent confirmation of the field's sign
    CHECK(fk.fk_residual <= 4.0 * fk.fk_stderr + 2e-5);
}

TEST_CASE("utility ODE: stationary case, sign preservation, integrator order") {
    const Preferences p = paper_prefs();
    for (double c : {0.5, 1.0, 2.0}) {
        const double v_star = std::pow(c, 1.0 - p.gamma) / (1.0 - p.gamma);
        const double v0 = utility_ode_eval(c, 3.0, v_star, p, 1e-3);
        CHECK(v0 == doctest::Approx(v_star).epsilon(1e-12));
    }
    // any nonpositive terminal value stays nonpositive along the flow
    for (double vT : {-0.1, -1.0, -5.0}) {
        CHECK(utility_ode_eval(1.0, 4.0, vT, p, 1e-3) <= 0.0);
    }
    // global error drops by ~16x per dt halving
    const double ref = utility_ode_eval(1.0, 2.0, -2.0, p, 1e-4);
    const double e1 = std::fabs(utility_ode_eval(1.0, 2.0, -2.0, p, 0.2) - ref);
    const double e2 = std::fabs(utility_ode_eval(1.0, 2.0, -2.0, p, 0.1) - ref);
    CHECK(e1 / e2 > 10.0);
    CHECK(e1 / e2 < 24.0);
}
