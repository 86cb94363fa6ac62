#include "hez/grid.hpp"

#include <stdexcept>
#include <string>

namespace hez {

Grid build_grid(const RectDomain& domain, int nw, int ny) {
    if (!(domain.L > 0.0) || !(domain.y1 > 0.0) || !(domain.y1 < domain.y2))
        throw std::invalid_argument("build_grid: degenerate domain");
    if (nw < 8 || ny < 8)
        throw std::invalid_argument("build_grid: need nw, ny >= 8, got nw = " +
                                    std::to_string(nw) + ", ny = " + std::to_string(ny));
    Grid g;
    g.nw = nw;
    g.ny = ny;
    g.domain = domain;
    g.hw = domain.L / (nw + 1);
    g.hy = (domain.y2 - domain.y1) / (ny + 1);
    return g;
}

}  // namespace hez
