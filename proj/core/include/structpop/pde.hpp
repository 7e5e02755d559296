#ifndef STRUCTPOP_PDE_HPP
#define STRUCTPOP_PDE_HPP

#include <string>
#include <vector>

#include "structpop/characteristics.hpp"
#include "structpop/density.hpp"
#include "structpop/grid.hpp"
#include "structpop/model.hpp"
#include "structpop/renewal.hpp"
#include "structpop/transport.hpp"

namespace structpop {

/// Recorded PDE solution. When renormalization is active each stored column
/// is scaled to unit mass and log_rescale accumulates the removed factors,
/// so log ||p(t_k)||_1 = log(stored norm) + log_rescale[k].
struct DensityTrajectory {
    std::string scheme;
    std::vector<double> times;
    std::vector<Density> columns;
    std::vector<double> log_rescale;
    double max_mass_residual = 0.0;  // upwind only: worst per-step balance defect
};

struct UpwindOptions {
    double cfl = 0.9;              // in (0, 1]; throws CflViolation otherwise
    bool renormalize = false;
    std::vector<double> record_times;  // empty: record every step
};

/// Conservative first-order upwind/forward-Euler scheme
///   p_i^{k+1} = p_i^k - dt/ds (F_i - F_{i-1}) - dt mu_i p_i^k
///               + dt sum_j w_j beta(s_i, s_j) p_j^k,   F_i = gamma_i p_i^k,
/// for i >= 1, with F_{-1} = 0 and the inflow value pinned to the boundary
/// condition gamma(0) p(0,t) = 0; mass exits freely at s = 1. The time step
/// is cfl * min(ds/max gamma, 1/max mu).
DensityTrajectory solve_pde_upwind(const VitalRates& rates, const Grid& grid,
                                   const Density& p0, double T,
                                   const UpwindOptions& options = {});

/// Variation-of-constants stepping with the transport semigroup:
///   p_{k+1} = T0(dt) p_k + dt T0(dt) C p_k,  dt = Gamma/M from the kernel set.
DensityTrajectory solve_pde_voc(const FlowCache& cache, const Grid& grid,
                                const AgeKernelSet& kernels, const Density& p0, double T,
                                bool renormalize = false);

/// Least-squares slope of log ||column||_1 over the final half of the time
/// window. Requires a span of at least 4 * Gamma (pass gamma_horizon) and
/// norms inside [1e-300, 1e300] (throws DegenerateTrajectory).
double growth_rate(const DensityTrajectory& traj, const Grid& grid, double gamma_horizon);
double growth_rate(const BirthTrajectory& traj, const Grid& grid, double gamma_horizon);

}  // namespace structpop

#endif
