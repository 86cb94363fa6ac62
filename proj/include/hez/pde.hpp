#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hez/grid.hpp"
#include "hez/model.hpp"

namespace hez {

enum class Scheme { newton, picard };

struct SolverOptions {
    double tolerance = 1e-10;  // max-norm residual target
    int max_iterations = 50;
    double damping = 1.0;  // in (0, 1]
    double c_bar = 5.0;    // phi-truncation level
    Scheme scheme = Scheme::newton;
};

struct Solution {
    Grid grid;
    std::vector<double> u;           // closure field, zero on the boundary
    std::vector<double> z_field;     // b u_y + beta u_w
    std::vector<double> zhat_field;  // Gamma u_w
    double c_tilde_sup = 0.0;        // max of u over the grid
    double zhat_sq_max = 0.0;        // max of zhat^2 over the grid
    double residual_norm = 0.0;
    int iterations = 0;
    double c_bar_used = 0.0;
    bool converged = false;
};

struct SupBounds {
    double c_tilde_sup;
    double zhat_sq_max;
    bool converged;
};

struct SolveNoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The solution escaped the truncation band; re-solve with a larger c_bar.
struct CbarExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Discrete residual L_h u + G(y, u, b u_y + beta u_w, Gamma u_w) at each
// interior node (second-order central differences, four-point cross stencil
// for the mixed term). u must vanish on the boundary nodes.
std::vector<double> assemble_residual(const std::vector<double>& u, const Grid& grid,
                                      const CoefficientSet& coeffs, const Preferences& prefs);

// Damped Newton (or Picard) on the discrete system with the phi-truncated
// generator; verifies max|u| <= c_bar on convergence so the truncation is
// inactive on the computed solution. Throws SolveNoConvergence/CbarExceeded.
// `active` optionally masks interior nodes (0 entries are pinned to zero),
// used for the corner-rounding comparison; empty means all interior active.
Solution solve_dirichlet(const Grid& grid, const CoefficientSet& coeffs,
                         const Preferences& prefs, const SolverOptions& opts,
                         const std::vector<std::uint8_t>& active = {});

// Retries solve_dirichlet with doubled c_bar (up to 40) on CbarExceeded.
Solution solve_dirichlet_auto(const Grid& grid, const CoefficientSet& coeffs,
                              const Preferences& prefs, SolverOptions opts);

// Z = b u_y + beta u_w, Zhat = Gamma u_w on the closure; central differences
// inside, second-order one-sided stencils on the boundary.
std::pair<std::vector<double>, std::vector<double>> gradient_fields(
    const std::vector<double>& u, const Grid& grid, const CoefficientSet& coeffs);

// Grid maxima approximating the essential suprema.
SupBounds sup_bounds(const Solution& sol);

// Bilinear interpolation of a closure field at (w, y); throws outside the
// domain closure (beyond a small rounding slack).
double interp_field(const std::vector<double>& field, const Grid& grid, double w, double y);

}  // namespace hez
