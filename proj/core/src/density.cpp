#include "structpop/density.hpp"

#include <algorithm>
#include <cmath>

namespace structpop {

Density sample_density(const Grid& grid, const std::function<double(double)>& f) {
    Density p(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) p[i] = f(grid.nodes[i]);
    return p;
}

double BirthHistory::interpolate(const Grid& grid, double s, double t) const {
    double u = std::clamp(s, 0.0, 1.0) / grid.ds;
    int i = std::min(static_cast<int>(u), n_size - 1);
    double a = u - i;
    double v = std::clamp((t + window()) / dt, 0.0, static_cast<double>(n_time));
    int k = std::min(static_cast<int>(v), n_time - 1);
    double b = v - k;
    return (1 - b) * ((1 - a) * at(i, k) + a * at(i + 1, k)) +
           b * ((1 - a) * at(i, k + 1) + a * at(i + 1, k + 1));
}

BirthHistory sample_history(const Grid& grid, int n_time, double window,
                            const std::function<double(double, double)>& phi) {
    BirthHistory h;
    h.n_size = grid.order();
    h.n_time = n_time;
    h.dt = window / n_time;
    h.values.resize(static_cast<std::size_t>(n_time + 1) * grid.size());
    for (int k = 0; k <= n_time; ++k) {
        double t = -window + k * h.dt;
        for (std::size_t i = 0; i < grid.size(); ++i) h.at(static_cast<int>(i), k) = phi(grid.nodes[i], t);
    }
    return h;
}

}  // namespace structpop
