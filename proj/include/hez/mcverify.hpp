#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hez/model.hpp"
#include "hez/passage.hpp"
#include "hez/pde.hpp"

namespace hez {

enum class ExitSide { w_minus, w_plus, y_minus, y_plus };

struct StatePath {
    std::vector<double> times;
    std::vector<double> w_values;
    std::vector<double> y_values;
    std::size_t exit_index = 0;  // index of the exit record (on the boundary)
    ExitSide exit_side = ExitSide::w_plus;
    std::uint64_t seed = 0;
};

// Exit region: the full rectangle, or the return band alone (the y-walls are
// ignored, sampling the law the series describes).
enum class ExitRegion { rectangle, band };

struct SimOptions {
    // Brownian-bridge crossing test for the w-walls between monitoring
    // points. Off reproduces plain discretely-monitored exits, whose
    // O(sqrt(dt)) boundary bias is visible at the default step sizes.
    bool bridge = true;
    std::size_t max_steps = 1u << 30;
};

// Full-truncation Euler for Y, Euler for W, stopped at the rectangle exit
// with linear (or bridge-sampled) crossing refinement. Deterministic in
// (seed); requires (w0, y0) strictly inside the domain.
StatePath simulate_state(double w0, double y0, const HestonParams& params,
                         const RectDomain& domain, double dt, std::uint64_t seed,
                         const SimOptions& opts = {});

// i.i.d. exit-time samples; paths are independent streams of the master seed.
std::vector<double> sample_exit_times(std::size_t n_paths, double w0, double y0,
                                      const HestonParams& params, const RectDomain& domain,
                                      ExitRegion region, double dt, std::uint64_t seed,
                                      const SimOptions& opts = {});

// Kolmogorov-Smirnov distance between the empirical CDF of the samples and
// the series CDF 1 - survival(w0, y0, .). Requires >= 10^4 samples.
double empirical_vs_series(std::vector<double> samples, const ExitLaw& law, double w0,
                           double y0);

struct FkResult {
    double u_value = 0.0;   // PDE value at the probe
    double mc_mean = 0.0;   // Monte Carlo mean of the pathwise integral of G
    double fk_residual = 0.0;
    double fk_stderr = 0.0;
    std::size_t n_paths = 0;
    double dt = 0.0;
};

// Feynman-Kac identity u(w0,y0) = E[int_0^tau G(Y, u, Z, Zhat) ds] with the
// fields bilinearly interpolated from the solution; left-endpoint rule.
FkResult feynman_kac_check(const Solution& sol, const HestonParams& params,
                           const RectDomain& domain, double w0, double y0,
                           std::size_t n_paths, double dt, std::uint64_t seed,
                           const Preferences& prefs, const SimOptions& opts = {});

// Backward fourth-order integration of dV/dt = -f(c, V) on [0, T] with
// V(T) = terminal_v; returns V(0).
double utility_ode_eval(double c_const, double T, double terminal_v,
                        const Preferences& prefs, double dt);

struct VerificationReport {
    double ks_distance = -1.0;  // negative when not computed
    double fk_residual = 0.0;
    double fk_stderr = 0.0;
    std::size_t n_paths = 0;
    double dt = 0.0;
    std::array<double, 4> exit_face_freq{};  // w-, w+, y-, y+
};

// Per-face exit frequencies over n_paths rectangle-mode simulations.
std::array<double, 4> exit_face_frequencies(std::size_t n_paths, double w0, double y0,
                                            const HestonParams& params,
                                            const RectDomain& domain, double dt,
                                            std::uint64_t seed, const SimOptions& opts = {});

}  // namespace hez
