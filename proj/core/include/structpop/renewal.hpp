#ifndef STRUCTPOP_RENEWAL_HPP
#define STRUCTPOP_RENEWAL_HPP

#include <span>
#include <vector>

#include "structpop/density.hpp"
#include "structpop/grid.hpp"
#include "structpop/transport.hpp"

namespace structpop {

/// Solution of the renewal equation on [0, T] together with the history it
/// started from. Columns are stored for k = -M..K at the shared time step
/// dt = Gamma/M; negative indices address the history.
struct BirthTrajectory {
    double dt = 0.0;
    int n_size = 0;    // N
    int hist_len = 0;  // M
    int n_steps = 0;   // K: computed columns are k = 0..K
    std::vector<double> values;  // ((M+K+1) columns) x (N+1), column-major
    std::vector<double> phi_final;  // phi(., 0): kept apart from the computed b(t_0)

    double time(int k) const { return k * dt; }

    std::span<double> col(int k) {
        return {values.data() + static_cast<std::size_t>(k + hist_len) * (n_size + 1),
                static_cast<std::size_t>(n_size + 1)};
    }
    std::span<const double> col(int k) const {
        return {values.data() + static_cast<std::size_t>(k + hist_len) * (n_size + 1),
                static_cast<std::size_t>(n_size + 1)};
    }
};

/// Explicit stepping of b(t_k) = sum_{m=1..M} dt * L0(a_m) b(t_k - a_m),
/// with past values taken from the computed trajectory (k - m >= 0) or from
/// the history phi (k - m < 0). b(t_0) itself is computed from the pure
/// history; phi(.,0) stays recorded in the history block. Throws
/// StepMismatch when phi.dt != Gamma/M.
BirthTrajectory solve_renewal(const AgeKernelSet& kernels, const Grid& grid,
                              const BirthHistory& phi, double T);

/// Forcing function f(t) = int_t^Gamma L0(a) phi(t-a) da (right-endpoint
/// ages); exactly the zero vector for t >= Gamma.
Density forcing_function(const AgeKernelSet& kernels, const Grid& grid,
                         const BirthHistory& phi, double t);

/// All forcing columns f_k = f(t_k) for k = 0..ceil(Gamma/dt).
std::vector<Density> forcing_sequence(const AgeKernelSet& kernels, const Grid& grid,
                                      const BirthHistory& phi, int n_steps);

/// Resolvent kernel family L(t_k) obtained from the discrete convolution
/// fixed point
///   L_0 = C,   L_k = L0(t_k) + sum_{m=1..k} dt L0(t_m) L_{k-m},
/// which sums the generation expansion exactly on the grid. Actions are
/// evaluated matrix-free by running the recursion on vectors.
class ResolventKernel {
  public:
    ResolventKernel(const AgeKernelSet& kernels, const Grid& grid, double T);

    int n_steps() const { return n_steps_; }
    double dt() const { return kernels_->dt; }

    /// The vectors L(t_k) psi for k = 0..n_steps.
    std::vector<Density> actions(const Density& psi) const;

    /// c_k = sum_{m=1..k} dt L(t_m) f_{k-m} for k = 0..n_steps, computed via
    /// the identity c_k = sum_i dt L0(t_i) [f_{k-i} + dt C f_{k-i} + c_{k-i}]
    /// (exactly the materialized-kernel sum, without storing matrices).
    std::vector<Density> convolve(const std::vector<Density>& f) const;

  private:
    const AgeKernelSet* kernels_;
    const Grid* grid_;
    int n_steps_;
};

/// Throws HorizonTooLong for T > 8 * Gamma.
ResolventKernel build_resolvent_kernel(const AgeKernelSet& kernels, const Grid& grid,
                                       double T);

/// The segment b_t: window b(., t + theta), theta in [-Gamma, 0], as a new
/// history. t must lie on the time grid inside [0, T] (throws OutOfWindow).
/// At t = 0 the stored history is returned verbatim.
BirthHistory shift_segment(const BirthTrajectory& traj, double t);

}  // namespace structpop

#endif
