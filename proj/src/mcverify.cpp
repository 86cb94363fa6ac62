#include "hez/mcverify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>

#include "hez/generators.hpp"
#include "hez/rng.hpp"

namespace hez {

namespace {

struct ExitEvent {
    double t = 0.0;
    double w = 0.0;
    double y = 0.0;
    ExitSide side = ExitSide::w_plus;
};

// Advances one path until it leaves the region; on_step(w, y, dt_eff) is
// called with the left-endpoint state and the effective in-region duration
// of each step (the last one is the crossing fraction).
template <typename OnStep>
ExitEvent run_path(double w0, double y0, const HestonParams& p, const RectDomain& dom,
                   ExitRegion region, double dt, std::uint64_t seed, std::uint64_t path,
                   const SimOptions& opts, OnStep&& on_step) {
    const double half = dom.L / 2.0;
    const double sqdt = std::sqrt(dt);
    const bool rect = region == ExitRegion::rectangle;
    double w = w0, y = y0, t = 0.0;
    for (std::uint32_t step = 0;; ++step) {
        if (step >= opts.max_steps)
            throw std::runtime_error("simulate: path exceeded max_steps before exiting");
        const double y_plus = std::max(y, 0.0);
        const double s2 = y_plus + p.eps;
        const NormalPair n = normal_pair(seed, path, step, 0);
        const double w_next = w + std::sqrt(s2) * sqdt * n.first;
        const double y_next =
            y - p.alpha * (y_plus - p.m2) * dt + p.k * std::sqrt(y_plus) * sqdt * n.second;

        // First trajectory crossing along the segment.
        double xi = 2.0;
        ExitSide side = ExitSide::w_plus;
        if (w_next >= half && w_next != w) {
            const double c = (half - w) / (w_next - w);
            if (c < xi) { xi = c; side = ExitSide::w_plus; }
        }
        if (w_next <= -half && w_next != w) {
            const double c = (-half - w) / (w_next - w);
            if (c < xi) { xi = c; side = ExitSide::w_minus; }
        }
        if (rect) {
            if (y_next <= dom.y1 && y_next != y) {
                const double c = (dom.y1 - y) / (y_next - y);
                if (c < xi) { xi = c; side = ExitSide::y_minus; }
            }
            if (y_next >= dom.y2 && y_next != y) {
                const double c = (dom.y2 - y) / (y_next - y);
                if (c < xi) { xi = c; side = ExitSide::y_plus; }
            }
        }
        if (xi <= 1.0) {
            on_step(w, y, xi * dt);
            ExitEvent ev;
            ev.t = t + xi * dt;
            ev.w = w + xi * (w_next - w);
            ev.y = y + xi * (y_next - y);
            ev.side = side;
            if (side == ExitSide::w_plus) ev.w = half;
            if (side == ExitSide::w_minus) ev.w = -half;
            if (side == ExitSide::y_minus) ev.y = dom.y1;
            if (side == ExitSide::y_plus) ev.y = dom.y2;
            return ev;
        }

        if (opts.bridge && s2 > 0.0) {
            // Crossing probability of a Brownian bridge between the two
            // monitored points, one test per wall.
            const double denom = s2 * dt;
            const double p_up = std::exp(-2.0 * (half - w) * (half - w_next) / denom);
            const double p_dn = std::exp(-2.0 * (w + half) * (w_next + half) / denom);
            const UniformPair u = uniform_pair(seed, path, step, 1);
            if (u.first < p_up + p_dn) {
                const double frac = u.second;  // in-step exit time fraction
                on_step(w, y, frac * dt);
                ExitEvent ev;
                ev.t = t + frac * dt;
                ev.side = u.first < p_up ? ExitSide::w_plus : ExitSide::w_minus;
                ev.w = ev.side == ExitSide::w_plus ? half : -half;
                ev.y = y + frac * (y_next - y);
                if (rect) ev.y = std::clamp(ev.y, dom.y1, dom.y2);
                return ev;
            }
        }

        on_step(w, y, dt);
        w = w_next;
        y = y_next;
        t += dt;
    }
}

void check_start(double w0, double y0, const RectDomain& dom, ExitRegion region) {
    const double half = dom.L / 2.0;
    if (!(w0 > -half && w0 < half))
        throw std::invalid_argument("simulate: w0 must lie strictly inside the band");
    if (region == ExitRegion::rectangle && !(y0 > dom.y1 && y0 < dom.y2))
        throw std::invalid_argument("simulate: y0 must lie strictly inside (y1, y2)");
    if (!(y0 > 0.0)) throw std::invalid_argument("simulate: y0 must be positive");
}

void parallel_paths(std::size_t n_paths, const std::function<void(std::size_t)>& body) {
    const unsigned nt = std::min<std::size_t>(thread_budget(), std::max<std::size_t>(n_paths, 1));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n_paths; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned k = 0; k < nt; ++k) {
        pool.emplace_back([&, k] {
            for (std::size_t i = k; i < n_paths; i += nt) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

}  // namespace

StatePath simulate_state(double w0, double y0, const HestonParams& params,
                         const RectDomain& domain, double dt, std::uint64_t seed,
                         const SimOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("simulate_state: dt must be positive");
    check_start(w0, y0, domain, ExitRegion::rectangle);
    StatePath path;
    path.seed = seed;
    double t = 0.0;
    auto record = [&](double wv, double yv, double dt_eff) {
        path.times.push_back(t);
        path.w_values.push_back(wv);
        path.y_values.push_back(yv);
        t += dt_eff;
    };
    const ExitEvent ev = run_path(w0, y0, params, domain, ExitRegion::rectangle, dt, seed,
                                  /*path=*/0, opts, record);
    path.times.push_back(ev.t);
    path.w_values.push_back(ev.w);
    path.y_values.push_back(ev.y);
    path.exit_index = path.times.size() - 1;
    path.exit_side = ev.side;
    return path;
}

std::vector<double> sample_exit_times(std::size_t n_paths, double w0, double y0,
                                      const HestonParams& params, const RectDomain& domain,
                                      ExitRegion region, double dt, std::uint64_t seed,
                                      const SimOptions& opts) {
    if (n_paths < 1) throw std::invalid_argument("sample_exit_times: n_paths must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("sample_exit_times: dt must be positive");
    check_start(w0, y0, domain, region);
    std::vector<double> out(n_paths, 0.0);
    parallel_paths(n_paths, [&](std::size_t i) {
        const ExitEvent ev = run_path(w0, y0, params, domain, region, dt, seed, i, opts,
                                      [](double, double, double) {});
        out[i] = ev.t;
    });
    return out;
}

double empirical_vs_series(std::vector<double> samples, const ExitLaw& law, double w0,
                           double y0) {
    if (samples.size() < 10000)
        throw std::invalid_argument("empirical_vs_series: need at least 10^4 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = 1.0 - survival(w0, y0, samples[i], law);
        d = std::max(d, std::fabs(F - (static_cast<double>(i) + 1.0) / n));
        d = std::max(d, std::fabs(F - static_cast<double>(i) / n));
    }
    return d;
}

FkResult feynman_kac_check(const Solution& sol, const HestonParams& params,
                           const RectDomain& domain, double w0, double y0,
                           std::size_t n_paths, double dt, std::uint64_t seed,
                           const Preferences& prefs, const SimOptions& opts) {
    if (!sol.converged)
        throw std::invalid_argument("feynman_kac_check: solution is not converged");
    check_start(w0, y0, domain, ExitRegion::rectangle);
    const CoefficientSet coeffs = heston_coefficients(params);
    std::vector<double> contrib(n_paths, 0.0);
    parallel_paths(n_paths, [&](std::size_t i) {
        double acc = 0.0;
        run_path(w0, y0, params, domain, ExitRegion::rectangle, dt, seed, i, opts,
                 [&](double w, double y, double dt_eff) {
                     const double uv = interp_field(sol.u, sol.grid, w, y);
                     const double zv = interp_field(sol.z_field, sol.grid, w, y);
                     const double zhv = interp_field(sol.zhat_field, sol.grid, w, y);
                     acc += pde_generator_G(y, uv, zv, zhv, coeffs, prefs) * dt_eff;
                 });
        contrib[i] = acc;
    });
    const double mean = pairwise_sum(contrib.data(), contrib.size()) / contrib.size();
    double ss = 0.0;
    for (double c : contrib) ss += (c - mean) * (c - mean);
    const double stderr_ = std::sqrt(ss / (contrib.size() > 1 ? contrib.size() - 1 : 1)) /
                           std::sqrt(static_cast<double>(contrib.size()));
    FkResult res;
    res.u_value = interp_field(sol.u, sol.grid, w0, y0);
    res.mc_mean = mean;
    res.fk_residual = std::fabs(res.u_value - mean);
    res.fk_stderr = stderr_;
    res.n_paths = n_paths;
    res.dt = dt;
    return res;
}

double utility_ode_eval(double c_const, double T, double terminal_v,
                        const Preferences& prefs, double dt) {
    if (!(c_const > 0.0)) throw std::invalid_argument("utility_ode_eval: c must be positive");
    if (terminal_v > 0.0)
        throw std::invalid_argument("utility_ode_eval: terminal value must be nonpositive");
    if (!(T >= 0.0) || !(dt > 0.0))
        throw std::invalid_argument("utility_ode_eval: need T >= 0 and dt > 0");
    const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T / dt)));
    const double h = T / static_cast<double>(n);
    // In backward time tau = T - t the recursion reads dV/dtau = f(c, V).
    auto rhs = [&](double v) { return aggregator_f(c_const, std::min(v, 0.0), prefs); };
    double v = terminal_v;
    for (std::size_t i = 0; i < n; ++i) {
        const double k1 = rhs(v);
        const double k2 = rhs(v + 0.5 * h * k1);
        const double k3 = rhs(v + 0.5 * h * k2);
        const double k4 = rhs(v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return v;
}

std::array<double, 4> exit_face_frequencies(std::size_t n_paths, double w0, double y0,
                                            const HestonParams& params,
                                            const RectDomain& domain, double dt,
                                            std::uint64_t seed, const SimOptions& opts) {
    check_start(w0, y0, domain, ExitRegion::rectangle);
    std::vector<std::uint8_t> sides(n_paths, 0);
    parallel_paths(n_paths, [&](std::size_t i) {
        const ExitEvent ev = run_path(w0, y0, params, domain, ExitRegion::rectangle, dt, seed,
                                      i, opts, [](double, double, double) {});
        sides[i] = static_cast<std::uint8_t>(ev.side);
    });
    std::array<double, 4> freq{};
    for (std::uint8_t s : sides) freq[s] += 1.0;
    for (double& f : freq) f /= static_cast<double>(n_paths);
    return freq;
}

}  // namespace hez
