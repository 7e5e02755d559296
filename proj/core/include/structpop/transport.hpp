#ifndef STRUCTPOP_TRANSPORT_HPP
#define STRUCTPOP_TRANSPORT_HPP

#include <span>
#include <vector>

#include "structpop/characteristics.hpp"
#include "structpop/density.hpp"
#include "structpop/grid.hpp"
#include "structpop/model.hpp"

namespace structpop {

/// Dense recruitment operator: (C p)_i = sum_j w_j beta(s_i, s_j) p_j.
/// Assembled once and reused inside the time-stepping loops.
class RecruitmentOperator {
  public:
    RecruitmentOperator() = default;
    RecruitmentOperator(const VitalRates& rates, const Grid& grid);

    void apply(std::span<const double> p, std::span<double> out) const;
    Density apply(const Density& p) const;

    int grid_order() const { return n_; }

  private:
    int n_ = 0;
    std::vector<double> entries_;  // (N+1)x(N+1), row-major, includes w_j
};

/// Birth-free transport semigroup applied for time t:
///   (T0(t) p)(s_i) = 0 if t > G(s_i), else
///   p(S0) * gamma(S0)/gamma(s_i) * survival(S0, s_i),  S0 = backward foot point,
/// with p evaluated by linear interpolation on the grid.
Density apply_T0(const FlowCache& cache, const Grid& grid, double t, const Density& p);

/// (C p)(s_i) = quadrature of int_0^1 beta(s_i, y) p(y) dy.
Density apply_C(const VitalRates& rates, const Grid& grid, const Density& p);

/// Per-node application recipe for T0(a) at a fixed age a: interpolation
/// stencil at the backward foot point plus the growth/survival factor.
/// Nodes with a > G(s_j) are marked dead (the nilpotent branch).
struct TransportRecipe {
    struct Node {
        int cell = 0;        // interpolation cell index of the foot point
        double w_right = 0;  // weight of the right stencil node
        double factor = 0;   // gamma(S0)/gamma(s_j) * survival(S0, s_j)
        bool alive = false;
    };
    double age = 0.0;
    std::vector<Node> nodes;  // one per grid node

    void apply(std::span<const double> p, std::span<double> out) const;
};

TransportRecipe make_transport_recipe(const VitalRates& rates, const FlowCache& cache,
                                      const Grid& grid, double age);

/// Precomputed age-kernel family L0(a_m) = C T0(a_m) at the M right-endpoint
/// ages a_m = m * Gamma/M, m = 1..M, plus the shared recruitment matrix.
/// Immutable after construction.
struct AgeKernelSet {
    double dt = 0.0;  // Gamma / M
    int n_ages = 0;   // M
    std::vector<TransportRecipe> recipes;  // recipes[m-1] holds age a_m
    RecruitmentOperator recruitment;
    double gamma_horizon = 0.0;  // Gamma

    const TransportRecipe& recipe(int m) const { return recipes[m - 1]; }

    /// L0(a_m) u = C (T0(a_m) u).
    Density apply_L0(int m, const Density& u) const;
};

/// Throws GridTooCoarse for M < 8.
AgeKernelSet build_age_kernels(const VitalRates& rates, const FlowCache& cache,
                               const Grid& grid, int n_ages);

/// Population density generated at time 0 by the birth history phi:
///   (K phi)(s_i) = 1/gamma(s_i) * int_0^{s_i} phi(x, -tau(x, s_i))
///                  survival(x, s_i) dx,
/// the discretization of int_0^Gamma T0(a) phi(-a) da.
Density apply_K(const FlowCache& cache, const Grid& grid, const BirthHistory& phi);

enum class HistoryWeighting { Uniform, Survival };

/// Constructs a history phi >= 0 with apply_K(phi) = p0 up to quadrature
/// error, by spreading p0 over ancestors along backward characteristics:
///   phi(x, t) = gamma(Y) p0(Y) w(x, Y) / survival(x, Y),  Y = S(-t; x),
/// where the age weight w(.,y) integrates to 1 over [0,y]. "Uniform" uses
/// w = 1/y; "Survival" (default) uses w(x,y) = survival(x,y)/int_0^y survival.
/// Throws DegenerateWeight when sampled phi exceeds 1e12.
BirthHistory history_from_density(const VitalRates& rates, const FlowCache& cache,
                                  const Grid& grid, const Density& p0, int n_time,
                                  HistoryWeighting weighting = HistoryWeighting::Survival);

}  // namespace structpop

#endif
