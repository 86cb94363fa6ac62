#include "hez/pde.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <string>

#include "hez/generators.hpp"

namespace hez {

namespace {

struct NodeCoeffs {
    std::vector<double> a, b, b2;            // per y-row
    std::vector<double> aw, bw, gw;          // per node, closure-indexed
    std::vector<double> diff_w, cross;       // (beta^2+Gamma^2)/2 and b*beta per node
};

NodeCoeffs cache_coeffs(const Grid& g, const CoefficientSet& c) {
    NodeCoeffs nc;
    nc.a.resize(g.nodes_y());
    nc.b.resize(g.nodes_y());
    nc.b2.resize(g.nodes_y());
    for (int j = 0; j < g.nodes_y(); ++j) {
        const double y = g.y(j);
        nc.a[j] = c.a(y);
        nc.b[j] = c.b(y);
        nc.b2[j] = nc.b[j] * nc.b[j];
    }
    nc.aw.resize(g.n_nodes());
    nc.bw.resize(g.n_nodes());
    nc.gw.resize(g.n_nodes());
    nc.diff_w.resize(g.n_nodes());
    nc.cross.resize(g.n_nodes());
    for (int j = 0; j < g.nodes_y(); ++j) {
        const double y = g.y(j);
        for (int i = 0; i < g.nodes_w(); ++i) {
            const double w = g.w(i);
            const std::size_t n = g.idx(i, j);
            nc.aw[n] = c.alpha_w(w, y);
            nc.bw[n] = c.beta_w(w, y);
            nc.gw[n] = c.gamma_w(w, y);
            nc.diff_w[n] = (nc.bw[n] * nc.bw[n] + nc.gw[n] * nc.gw[n]) / 2.0;
            nc.cross[n] = nc.b[j] * nc.bw[n];
        }
    }
    return nc;
}

struct Derivs {
    double uw, uy, z, zhat, lap;
};

inline Derivs node_derivs(const std::vector<double>& u, const Grid& g, const NodeCoeffs& nc,
                          int i, int j) {
    const std::size_t n = g.idx(i, j);
    const double uw = (u[g.idx(i + 1, j)] - u[g.idx(i - 1, j)]) / (2.0 * g.hw);
    const double uy = (u[g.idx(i, j + 1)] - u[g.idx(i, j - 1)]) / (2.0 * g.hy);
    const double uww = (u[g.idx(i + 1, j)] - 2.0 * u[n] + u[g.idx(i - 1, j)]) / (g.hw * g.hw);
    const double uyy = (u[g.idx(i, j + 1)] - 2.0 * u[n] + u[g.idx(i, j - 1)]) / (g.hy * g.hy);
    double uyw = 0.0;
    if (nc.cross[n] != 0.0)
        uyw = (u[g.idx(i + 1, j + 1)] - u[g.idx(i + 1, j - 1)] - u[g.idx(i - 1, j + 1)] +
               u[g.idx(i - 1, j - 1)]) /
              (4.0 * g.hw * g.hy);
    Derivs d;
    d.uw = uw;
    d.uy = uy;
    d.z = nc.b[j] * uy + nc.bw[n] * uw;
    d.zhat = nc.gw[n] * uw;
    d.lap = nc.a[j] * uy + nc.aw[n] * uw + nc.b2[j] / 2.0 * uyy + nc.diff_w[n] * uww +
            nc.cross[n] * uyw;
    return d;
}

// Residual with the phi-truncated generator; masked nodes get 0.
std::vector<double> residual_phi(const std::vector<double>& u, const Grid& g,
                                 const NodeCoeffs& nc, const CoefficientSet& coeffs,
                                 const Preferences& prefs, double c_bar,
                                 const std::vector<std::uint8_t>& active) {
    std::vector<double> r(g.n_interior(), 0.0);
    for (int j = 1; j <= g.ny; ++j) {
        const double y = g.y(j);
        for (int i = 1; i <= g.nw; ++i) {
            const std::size_t li = static_cast<std::size_t>(j - 1) * g.nw + (i - 1);
            if (!active.empty() && !active[li]) continue;
            const Derivs d = node_derivs(u, g, nc, i, j);
            r[li] = d.lap + pde_generator_G_phi(y, u[g.idx(i, j)], d.z, d.zhat, c_bar,
                                                coeffs, prefs);
        }
    }
    return r;
}

double max_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace

std::vector<double> assemble_residual(const std::vector<double>& u, const Grid& grid,
                                      const CoefficientSet& coeffs, const Preferences& prefs) {
    if (u.size() != grid.n_nodes())
        throw std::invalid_argument("assemble_residual: field size does not match the grid");
    const NodeCoeffs nc = cache_coeffs(grid, coeffs);
    std::vector<double> r(grid.n_interior(), 0.0);
    for (int j = 1; j <= grid.ny; ++j) {
        const double y = grid.y(j);
        for (int i = 1; i <= grid.nw; ++i) {
            const Derivs d = node_derivs(u, grid, nc, i, j);
            r[static_cast<std::size_t>(j - 1) * grid.nw + (i - 1)] =
                d.lap + pde_generator_G(y, u[grid.idx(i, j)], d.z, d.zhat, coeffs, prefs);
        }
    }
    return r;
}

Solution solve_dirichlet(const Grid& grid, const CoefficientSet& coeffs,
                         const Preferences& prefs, const SolverOptions& opts,
                         const std::vector<std::uint8_t>& active) {
    if (!(opts.tolerance > 0.0))
        throw std::invalid_argument("solver: tolerance must be positive");
    if (!(opts.damping > 0.0) || opts.damping > 1.0)
        throw std::invalid_argument("solver: damping must lie in (0, 1]");
    if (!active.empty() && active.size() != grid.n_interior())
        throw std::invalid_argument("solver: active mask size mismatch");

    const NodeCoeffs nc = cache_coeffs(grid, coeffs);

    // Compact unknown numbering over active interior nodes.
    std::vector<long> unum(grid.n_interior(), -1);
    long nu = 0;
    for (std::size_t li = 0; li < grid.n_interior(); ++li)
        if (active.empty() || active[li]) unum[li] = nu++;
    if (nu == 0) throw std::invalid_argument("solver: no active unknowns");

    std::vector<double> u(grid.n_nodes(), 0.0);  // initial iterate: boundary value

    Eigen::SparseMatrix<double> A(nu, nu);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nu) * 9);
    bool pattern_ready = false;

    auto unknown = [&](int i, int j) -> long {
        if (grid.is_boundary(i, j)) return -1;
        return unum[static_cast<std::size_t>(j - 1) * grid.nw + (i - 1)];
    };

    const bool newton = opts.scheme == Scheme::newton;
    std::vector<double> res = residual_phi(u, grid, nc, coeffs, prefs, opts.c_bar, active);
    double rnorm = max_norm(res);
    int it = 0;

    for (; it < opts.max_iterations && rnorm > opts.tolerance; ++it) {
        trips.clear();
        Eigen::VectorXd rhs(nu);
        for (int j = 1; j <= grid.ny; ++j) {
            const double y = grid.y(j);
            for (int i = 1; i <= grid.nw; ++i) {
                const std::size_t li = static_cast<std::size_t>(j - 1) * grid.nw + (i - 1);
                const long row = unum[li];
                if (row < 0) continue;
                const std::size_t n = grid.idx(i, j);
                rhs(row) = -res[li];

                double gd = 0.0, gz = 0.0, gzh = 0.0;
                if (newton) {
                    const Derivs d = node_derivs(u, grid, nc, i, j);
                    gd = pde_generator_G_phi_d(y, u[n], opts.c_bar, coeffs, prefs);
                    gz = pde_generator_G_phi_z(y, d.z, d.zhat, coeffs, prefs);
                    gzh = pde_generator_G_phi_zhat(y, d.z, d.zhat, coeffs, prefs);
                }
                const double cw = nc.diff_w[n] / (grid.hw * grid.hw);
                const double cy = nc.b2[j] / (2.0 * grid.hy * grid.hy);
                const double dw = (nc.aw[n] + (newton ? gz * nc.bw[n] + gzh * nc.gw[n] : 0.0)) /
                                  (2.0 * grid.hw);
                const double dy = (nc.a[j] + (newton ? gz * nc.b[j] : 0.0)) / (2.0 * grid.hy);

                trips.emplace_back(row, row, -2.0 * cw - 2.0 * cy + gd);
                const long east = unknown(i + 1, j), west = unknown(i - 1, j);
                const long north = unknown(i, j + 1), south = unknown(i, j - 1);
                if (east >= 0) trips.emplace_back(row, east, cw + dw);
                if (west >= 0) trips.emplace_back(row, west, cw - dw);
                if (north >= 0) trips.emplace_back(row, north, cy + dy);
                if (south >= 0) trips.emplace_back(row, south, cy - dy);
                if (nc.cross[n] != 0.0) {
                    const double cc = nc.cross[n] / (4.0 * grid.hw * grid.hy);
                    const long ne = unknown(i + 1, j + 1), nw_ = unknown(i - 1, j + 1);
                    const long se = unknown(i + 1, j - 1), sw = unknown(i - 1, j - 1);
                    if (ne >= 0) trips.emplace_back(row, ne, cc);
                    if (sw >= 0) trips.emplace_back(row, sw, cc);
                    if (nw_ >= 0) trips.emplace_back(row, nw_, -cc);
                    if (se >= 0) trips.emplace_back(row, se, -cc);
                }
            }
        }
        A.setFromTriplets(trips.begin(), trips.end());
        if (!pattern_ready) {
            lu.analyzePattern(A);
            pattern_ready = true;
        }
        lu.factorize(A);
        if (lu.info() != Eigen::Success)
            throw SolveNoConvergence("solver: sparse factorization failed");
        Eigen::VectorXd step = lu.solve(rhs);

        // Backtracking on the max-norm residual.
        double t = opts.damping;
        std::vector<double> u_try(u.size());
        std::vector<double> res_try;
        double rnorm_try = 0.0;
        for (int bt = 0; bt < 12; ++bt) {
            u_try = u;
            for (int j = 1; j <= grid.ny; ++j)
                for (int i = 1; i <= grid.nw; ++i) {
                    const long row = unum[static_cast<std::size_t>(j - 1) * grid.nw + (i - 1)];
                    if (row >= 0) u_try[grid.idx(i, j)] += t * step(row);
                }
            res_try = residual_phi(u_try, grid, nc, coeffs, prefs, opts.c_bar, active);
            rnorm_try = max_norm(res_try);
            if (rnorm_try < rnorm || t < 1.0 / 4096.0) break;
            t /= 2.0;
        }
        u.swap(u_try);
        res.swap(res_try);
        rnorm = rnorm_try;
    }

    if (rnorm > opts.tolerance)
        throw SolveNoConvergence("solver: residual " + std::to_string(rnorm) + " above tolerance after " +
                                 std::to_string(it) + " iterations");

    double umax_abs = 0.0;
    for (double v : u) umax_abs = std::max(umax_abs, std::fabs(v));
    if (umax_abs > opts.c_bar)
        throw CbarExceeded("solver: |u| = " + std::to_string(umax_abs) +
                           " exceeds the truncation level c_bar = " + std::to_string(opts.c_bar));

    Solution sol;
    sol.grid = grid;
    sol.u = std::move(u);
    auto fields = gradient_fields(sol.u, grid, coeffs);
    sol.z_field = std::move(fields.first);
    sol.zhat_field = std::move(fields.second);
    sol.residual_norm = rnorm;
    sol.iterations = it;
    sol.c_bar_used = opts.c_bar;
    sol.converged = true;
    double usup = 0.0, zh2 = 0.0;
    for (std::size_t n = 0; n < sol.u.size(); ++n) {
        usup = std::max(usup, sol.u[n]);
        zh2 = std::max(zh2, sol.zhat_field[n] * sol.zhat_field[n]);
    }
    sol.c_tilde_sup = usup;
    sol.zhat_sq_max = zh2;
    return sol;
}

Solution solve_dirichlet_auto(const Grid& grid, const CoefficientSet& coeffs,
                              const Preferences& prefs, SolverOptions opts) {
    for (;;) {
        try {
            return solve_dirichlet(grid, coeffs, prefs, opts);
        } catch (const CbarExceeded&) {
            if (opts.c_bar * 2.0 > 40.0) throw;
            opts.c_bar *= 2.0;
        }
    }
}

std::pair<std::vector<double>, std::vector<double>> gradient_fields(
    const std::vector<double>& u, const Grid& g, const CoefficientSet& coeffs) {
    if (u.size() != g.n_nodes())
        throw std::invalid_argument("gradient_fields: field size does not match the grid");
    std::vector<double> z(g.n_nodes(), 0.0), zh(g.n_nodes(), 0.0);
    auto d_w = [&](int i, int j) {
        if (i == 0)
            return (-3.0 * u[g.idx(0, j)] + 4.0 * u[g.idx(1, j)] - u[g.idx(2, j)]) / (2.0 * g.hw);
        if (i == g.nw + 1)
            return (3.0 * u[g.idx(i, j)] - 4.0 * u[g.idx(i - 1, j)] + u[g.idx(i - 2, j)]) /
                   (2.0 * g.hw);
        return (u[g.idx(i + 1, j)] - u[g.idx(i - 1, j)]) / (2.0 * g.hw);
    };
    auto d_y = [&](int i, int j) {
        if (j == 0)
            return (-3.0 * u[g.idx(i, 0)] + 4.0 * u[g.idx(i, 1)] - u[g.idx(i, 2)]) / (2.0 * g.hy);
        if (j == g.ny + 1)
            return (3.0 * u[g.idx(i, j)] - 4.0 * u[g.idx(i, j - 1)] + u[g.idx(i, j - 2)]) /
                   (2.0 * g.hy);
        return (u[g.idx(i, j + 1)] - u[g.idx(i, j - 1)]) / (2.0 * g.hy);
    };
    for (int j = 0; j < g.nodes_y(); ++j) {
        const double y = g.y(j);
        const double b = coeffs.b(y);
        for (int i = 0; i < g.nodes_w(); ++i) {
            const double w = g.w(i);
            const double uw = d_w(i, j), uy = d_y(i, j);
            z[g.idx(i, j)] = b * uy + coeffs.beta_w(w, y) * uw;
            zh[g.idx(i, j)] = coeffs.gamma_w(w, y) * uw;
        }
    }
    return {std::move(z), std::move(zh)};
}

SupBounds sup_bounds(const Solution& sol) {
    return SupBounds{sol.c_tilde_sup, sol.zhat_sq_max, sol.converged};
}

double interp_field(const std::vector<double>& field, const Grid& g, double w, double y) {
    const double slack_w = 1e-12 * std::max(1.0, std::fabs(g.domain.L));
    const double slack_y = 1e-12 * std::max(1.0, std::fabs(g.domain.y2));
    if (w < -g.domain.L / 2.0 - slack_w || w > g.domain.L / 2.0 + slack_w ||
        y < g.domain.y1 - slack_y || y > g.domain.y2 + slack_y)
        throw std::invalid_argument("interp_field: point outside the domain closure");
    double fw = (w + g.domain.L / 2.0) / g.hw;
    double fy = (y - g.domain.y1) / g.hy;
    int i = std::clamp(static_cast<int>(std::floor(fw)), 0, g.nw);
    int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny);
    const double tw = std::clamp(fw - i, 0.0, 1.0);
    const double ty = std::clamp(fy - j, 0.0, 1.0);
    return (1.0 - tw) * (1.0 - ty) * field[g.idx(i, j)] +
           tw * (1.0 - ty) * field[g.idx(i + 1, j)] +
           (1.0 - tw) * ty * field[g.idx(i, j + 1)] + tw * ty * field[g.idx(i + 1, j + 1)];
}

}  // namespace hez
