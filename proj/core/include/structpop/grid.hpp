#ifndef STRUCTPOP_GRID_HPP
#define STRUCTPOP_GRID_HPP

#include <cstddef>
#include <vector>

namespace structpop {

/// Uniform mesh on [0,1] with composite-trapezoid quadrature weights.
/// Immutable after construction; shared by every discretized operator.
struct Grid {
    std::vector<double> nodes;    // s_0 = 0 < s_1 < ... < s_N = 1
    std::vector<double> weights;  // w_0 = w_N = ds/2, else ds
    double ds = 0.0;

    int order() const { return static_cast<int>(nodes.size()) - 1; }  // N
    std::size_t size() const { return nodes.size(); }                 // N + 1
};

/// Builds the uniform grid with trapezoid weights. Throws GridTooCoarse for N < 4.
Grid make_grid(int n_cells);

/// Quadrature of grid samples: sum_i w_i f_i.
double integrate(const Grid& grid, const std::vector<double>& f);

/// L1 norm of a grid function: sum_i w_i |f_i|.
double norm_l1(const Grid& grid, const std::vector<double>& f);

}  // namespace structpop

#endif
