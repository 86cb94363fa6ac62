#pragma once

#include <cstddef>

#include "hez/model.hpp"

namespace hez {

// Uniform tensor grid on the closure of the rectangle. Node (i, j) with
// i in [0, nw+1], j in [0, ny+1]; i/j = 0 and nw+1/ny+1 are boundary nodes.
// Fields are stored row-major over the closure with w varying fastest.
struct Grid {
    int nw = 0;  // interior node count along w
    int ny = 0;  // interior node count along y
    double hw = 0.0;
    double hy = 0.0;
    RectDomain domain{};

    double w(int i) const { return -domain.L / 2.0 + i * hw; }
    double y(int j) const { return domain.y1 + j * hy; }
    int nodes_w() const { return nw + 2; }
    int nodes_y() const { return ny + 2; }
    std::size_t n_nodes() const { return static_cast<std::size_t>(nodes_w()) * nodes_y(); }
    std::size_t n_interior() const { return static_cast<std::size_t>(nw) * ny; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nodes_w() + i; }
    bool is_boundary(int i, int j) const {
        return i == 0 || i == nw + 1 || j == 0 || j == ny + 1;
    }
};

// Requires nw, ny >= 8.
Grid build_grid(const RectDomain& domain, int nw, int ny);

}  // namespace hez
