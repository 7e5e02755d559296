#ifndef STRUCTPOP_IRREDUCIBILITY_HPP
#define STRUCTPOP_IRREDUCIBILITY_HPP

#include <optional>
#include <vector>

#include "structpop/grid.hpp"
#include "structpop/model.hpp"
#include "structpop/spectral.hpp"

namespace structpop {

struct IrreducibilityReport {
    bool semigroup_irreducible = false;  // grid check of the alpha-condition
    bool L_irreducible_grid = false;     // strong connectivity of the kernel pattern
    bool L_sufficient = false;           // row integrals of beta positive
    std::optional<double> witness_alpha;       // first failing alpha
    std::vector<int> witness_component;        // one closed node set
    std::vector<double> r_trace;               // iterates of R from x0 = 1 - ds
};

/// Default positivity threshold: 1e-12 * (max sampled value).
double positivity_threshold(const VitalRates& rates, const Grid& grid);

/// Grid form of the semigroup criterion: for every interior node alpha
/// there is (s_i, s_j) with s_i <= alpha <= s_j and beta(s_i, s_j) > tol.
/// Returns the verdict and the first failing alpha.
std::pair<bool, std::optional<double>> semigroup_irreducible(const VitalRates& rates,
                                                             const Grid& grid, double tol);

/// R(x): smallest grid node s_i with beta(s_i, tau) > tol for some grid
/// tau >= x; 1 if beta vanishes on the strip. The smallest offspring size
/// producible by individuals of size >= x during the rest of their growth.
double compute_R(const VitalRates& rates, const Grid& grid, double x, double tol);

/// Iterates x_{n+1} = R(x_n) until a fixed point or max_n steps; records
/// the trace starting with x0.
std::vector<double> r_iteration(const VitalRates& rates, const Grid& grid, double x0,
                                int max_n, double tol);

/// Strong connectivity of the positivity pattern of the lambda = 0 kernel
/// matrix (edge j -> i iff entry(i,j) > tol). The s = 1 node is excluded:
/// its column is structurally zero (empty inner integral), the discrete
/// analogue of a null set. Returns the verdict and, when reducible, one
/// closed node set as witness.
std::pair<bool, std::vector<int>> L_irreducible_grid(const KernelMatrix& kernel, double tol);

/// Sufficient condition: for every node s_i < 1 the quadrature of
/// int_{s_i}^1 beta(s_i, r) dr exceeds tol.
bool L_sufficient(const VitalRates& rates, const Grid& grid, double tol);

/// Runs all three checks plus the R-iteration trace from x0 = 1 - ds.
IrreducibilityReport analyze_irreducibility(const VitalRates& rates, const FlowCache& cache,
                                            const Grid& grid);

}  // namespace structpop

#endif
