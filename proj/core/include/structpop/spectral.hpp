#ifndef STRUCTPOP_SPECTRAL_HPP
#define STRUCTPOP_SPECTRAL_HPP

#include <vector>

#include "structpop/characteristics.hpp"
#include "structpop/density.hpp"
#include "structpop/grid.hpp"
#include "structpop/model.hpp"

namespace structpop {

/// Nystrom discretization of the integral operator L_lambda:
///   entry(i,j) = k_lambda(s_i, s_j) * w_j,
///   k_lambda(s,r) = int_r^1 beta(s,y)/gamma(y)
///                   exp(-int_r^y (lambda+mu)/gamma) dy.
struct KernelMatrix {
    int n = 0;  // grid order N; matrix is (N+1)x(N+1)
    double lambda = 0.0;
    std::vector<double> entries;  // row-major

    double& at(int i, int j) { return entries[static_cast<std::size_t>(i) * (n + 1) + j]; }
    double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * (n + 1) + j]; }

    void apply(std::span<const double> x, std::span<double> y) const;
    Density apply(const Density& x) const;
};

/// Inner y-integral by composite trapezoid on the grid restricted to [r,1],
/// exponents from the FlowCache cumulative tables. O(N^2) assembly.
KernelMatrix build_L_lambda(const VitalRates& rates, const FlowCache& cache,
                            const Grid& grid, double lambda);

struct SpectralResult {
    double radius = 0.0;
    Density eigvec;       // nonnegative, normalized to L1 norm 1
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;  // false = NoConvergence (reported, not fatal)
};

/// Power iteration from the strictly positive uniform vector; the radius
/// estimate is the ratio of consecutive (quadrature-weighted) L1 norms.
/// Stops when ||K v - r v||_1 <= tol or after max_iter iterations.
SpectralResult spectral_radius(const KernelMatrix& kernel, const Grid& grid,
                               double tol = 1e-10, int max_iter = 10000);

enum class SignVerdict { Negative, Zero, Positive };

struct SignTestResult {
    SignVerdict verdict = SignVerdict::Zero;
    double margin = 0.0;  // r(L) - 1
    bool mu_zero_warning = false;
    SpectralResult spectral;
};

/// Sign of the growth bound via sign(r(L_0) - 1); Zero is declared inside a
/// band of 10*tol. When the mortality integrates to zero the theorem's
/// hypothesis is not covered and mu_zero_warning is set.
SignTestResult sign_test(const VitalRates& rates, const FlowCache& cache,
                         const Grid& grid, double tol = 1e-10);

struct RootResult {
    double lambda_star = 0.0;
    double radius_at_root = 0.0;
    int evaluations = 0;
};

/// Characteristic root: the real lambda with r(L_lambda) = 1, found by
/// doubling brackets in [-50, 50] and bisection on the strictly decreasing
/// map lambda -> r(L_lambda). Throws NoRoot when r stays below 1 down to
/// the lower bound.
RootResult solve_characteristic_root(const VitalRates& rates, const FlowCache& cache,
                                     const Grid& grid, double tol = 1e-8);

/// Eigenvector reconstruction from the birth profile:
///   p(s_i) = 1/gamma(s_i) * int_0^{s_i} exp(-int_r^{s_i}(lambda+mu)/gamma) f(r) dr.
Density eigendensity_from_f(const VitalRates& rates, const FlowCache& cache,
                            const Grid& grid, double lambda, const Density& f);

/// Steady density generated by a stationary birth profile (lambda = 0 case).
Density steady_state_from_b(const VitalRates& rates, const FlowCache& cache,
                            const Grid& grid, const Density& b);

/// Midpoint-rule Laplace transform of the age kernels:
///   sum_m da * exp(-lambda a_m) C T0(a_m),  a_m = (m - 1/2) da, da = Gamma/M,
/// assembled as a dense matrix. Throws GridTooCoarse for M < 32.
KernelMatrix laplace_L0_quadrature(const VitalRates& rates, const FlowCache& cache,
                                   const Grid& grid, double lambda, int n_ages);

}  // namespace structpop

#endif
