#include "structpop/grid.hpp"

#include <cmath>
#include <string>

#include "structpop/errors.hpp"

namespace structpop {

Grid make_grid(int n_cells) {
    if (n_cells < 4)
        throw Error(ErrorCode::GridTooCoarse, "need N >= 4, got " + std::to_string(n_cells));
    Grid grid;
    grid.ds = 1.0 / n_cells;
    grid.nodes.resize(n_cells + 1);
    grid.weights.resize(n_cells + 1);
    for (int i = 0; i <= n_cells; ++i) {
        grid.nodes[i] = static_cast<double>(i) / n_cells;
        grid.weights[i] = (i == 0 || i == n_cells) ? grid.ds / 2.0 : grid.ds;
    }
    grid.nodes.back() = 1.0;
    return grid;
}

double integrate(const Grid& grid, const std::vector<double>& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += grid.weights[i] * f[i];
    return sum;
}

double norm_l1(const Grid& grid, const std::vector<double>& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += grid.weights[i] * std::abs(f[i]);
    return sum;
}

}  // namespace structpop
