#ifndef STRUCTPOP_HARNESS_HPP
#define STRUCTPOP_HARNESS_HPP

#include <functional>
#include <string>
#include <vector>

#include "structpop/model.hpp"
#include "structpop/pde.hpp"

namespace structpop {

/// Analytic data for an experiment, kept resolution-independent so the same
/// input can be resampled on coarse and fine grids.
using HistoryFn = std::function<double(double s, double theta)>;
using DensityFn = std::function<double(double s)>;

struct EquivalenceReport {
    std::string experiment;
    int n_coarse = 0, m_coarse = 0;
    double T = 0.0;
    double sup_coarse = 0.0;      // summary discrepancy at (N, M)
    double sup_fine = 0.0;        // same at (2N, 2M)
    double ratio = 0.0;           // sup_coarse / sup_fine
    double tolerance = 0.0;
    bool pass = false;            // sup_coarse <= tolerance
    std::vector<std::pair<double, double>> table;  // (t, discrepancy) at (N, M)
    double direction1 = 0.0;      // steady-state experiment only
    double direction2 = 0.0;

    void finalize(double tol);
};

struct ExperimentOptions {
    int n = 200;        // size grid order
    int m = 200;        // history/time-step count
    double T = 0.0;     // horizon; 0 = experiment default (3 * Gamma)
    bool refine = true; // also run at (2N, 2M) for the convergence ratio
    bool auto_rescale = false;  // steady-state check: rescale beta by 1/r(L)
                                // on each resolution's own grid
};

/// Theorem "T(t) K phi = K S(t) phi": solves the renewal equation from phi,
/// maps segments through K, and compares against the upwind PDE solution
/// started from K phi. Discrepancy: sup_t ||K b_t - p_pde(t)||_1 / ||p0||_1.
EquivalenceReport run_intertwining(const VitalRates& rates, const HistoryFn& phi,
                                   const ExperimentOptions& options, double tolerance);

/// Theorem "b = C T(t) K phi": compares the renewal birth function against
/// C applied to the PDE solution from K phi. Sup-t L1 discrepancy, relative
/// to sup ||b||_1.
EquivalenceReport run_birth_extraction(const VitalRates& rates, const HistoryFn& phi,
                                       const ExperimentOptions& options, double tolerance,
                                       const std::string& scheme = "upwind");

/// Steady-state equivalence, both directions:
///   direction 1: b* = dominant eigenvector of L, p* = steady density from
///     b*; both PDE schemes must hold p* over [0, 3 Gamma];
///   direction 2: the constant history phi* = C p* must keep the renewal
///     solution at C p*.
/// Requires r(L) within 1e-3 of 1 (throws NotCritical; rescale beta first).
EquivalenceReport run_steady_state_check(const VitalRates& rates,
                                         const ExperimentOptions& options,
                                         double tol_direction1 = 3e-2,
                                         double tol_direction2 = 2e-2);

/// Range inclusion "T(t) psi = K(theta -> L(t+theta) psi)" for t >= Gamma:
/// left side by variation-of-constants stepping from psi, right side through
/// the resolvent kernel. Relative L1 discrepancy at the single time t.
EquivalenceReport run_range_inclusion(const VitalRates& rates, const DensityFn& psi,
                                      double t_over_gamma,
                                      const ExperimentOptions& options, double tolerance);

struct SignSweepRow {
    double theta = 0.0;
    double radius_minus_one = 0.0;
    double lambda_star = 0.0;       // NaN when no root exists
    double pde_rate = 0.0;          // Richardson-extrapolated from (N, 2N)
    double renewal_rate = 0.0;      // same
    double pde_rate_raw = 0.0;      // finest single-resolution fits
    double renewal_rate_raw = 0.0;
    bool signs_consistent = false;
};

struct SignSweepReport {
    std::vector<SignSweepRow> rows;
    double band = 5e-3;  // |rate| <= band counts as zero
    bool all_consistent = false;
};

/// Thieme sign relation as an experiment: for each factor theta the four
/// quantities r(L)-1, lambda*, fitted PDE growth rate and fitted renewal
/// growth rate must share one sign (within the zero band). Growth rates are
/// fitted at (N, M) and (2N, 2M) and Richardson-extrapolated to remove the
/// leading first-order discretization bias.
SignSweepReport run_sign_sweep(const VitalRates& rates, const std::vector<double>& thetas,
                               const ExperimentOptions& options);

/// Rescales beta by 1/r(L) so that the model sits at criticality.
VitalRates rescale_to_critical(const VitalRates& rates, const Grid& grid);

}  // namespace structpop

#endif
