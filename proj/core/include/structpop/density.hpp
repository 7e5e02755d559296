#ifndef STRUCTPOP_DENSITY_HPP
#define STRUCTPOP_DENSITY_HPP

#include <functional>
#include <span>
#include <vector>

#include "structpop/grid.hpp"

namespace structpop {

/// Grid sampling of a population density p (individuals per unit size).
struct Density {
    std::vector<double> values;  // values[i] = p(s_i), length N+1

    Density() = default;
    explicit Density(std::size_t n, double fill = 0.0) : values(n, fill) {}
    explicit Density(std::vector<double> v) : values(std::move(v)) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

Density sample_density(const Grid& grid, const std::function<double(double)>& f);

/// Birth function phi on the window [-Gamma, 0], sampled on the size grid
/// times a uniform time grid t_k = -Gamma + k*dt, k = 0..M. Stored
/// column-major: one density per time node.
struct BirthHistory {
    int n_size = 0;   // N  (columns hold N+1 values)
    int n_time = 0;   // M  (M+1 time nodes)
    double dt = 0.0;  // Gamma / M
    std::vector<double> values;  // values[k*(n_size+1) + i] = phi(s_i, t_k)

    double window() const { return dt * n_time; }
    double time_node(int k) const { return -window() + k * dt; }

    double& at(int i, int k) { return values[static_cast<std::size_t>(k) * (n_size + 1) + i]; }
    double at(int i, int k) const { return values[static_cast<std::size_t>(k) * (n_size + 1) + i]; }

    std::span<double> col(int k) {
        return {values.data() + static_cast<std::size_t>(k) * (n_size + 1),
                static_cast<std::size_t>(n_size + 1)};
    }
    std::span<const double> col(int k) const {
        return {values.data() + static_cast<std::size_t>(k) * (n_size + 1),
                static_cast<std::size_t>(n_size + 1)};
    }

    /// Bilinear evaluation at (s, t), s in [0,1], t in [-window, 0].
    double interpolate(const Grid& grid, double s, double t) const;
};

BirthHistory sample_history(const Grid& grid, int n_time, double window,
                            const std::function<double(double, double)>& phi);

}  // namespace structpop

#endif
