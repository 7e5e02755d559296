#include "structpop/irreducibility.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace structpop {

namespace {

// Kosaraju with explicit stacks; adjacency read straight off the kernel
// pattern. Node count excludes the s = 1 node (see header).
struct PatternGraph {
    int n = 0;  // nodes 0..n-1
    const KernelMatrix* kernel = nullptr;
    double tol = 0.0;

    // edge j -> i iff entry(i, j) > tol
    bool edge(int from, int to) const { return kernel->at(to, from) > tol; }
    bool redge(int from, int to) const { return kernel->at(from, to) > tol; }
};

template <typename Adj>
void dfs(int start, const Adj& next, int n, std::vector<char>& seen,
         std::vector<int>& out_order) {
    std::vector<std::pair<int, int>> stack;
    stack.emplace_back(start, 0);
    seen[start] = 1;
    while (!stack.empty()) {
        auto& [u, j] = stack.back();
        bool advanced = false;
        for (; j < n; ++j) {
            if (!seen[j] && next(u, j)) {
                seen[j] = 1;
                stack.emplace_back(j, 0);
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            out_order.push_back(u);
            stack.pop_back();
        }
    }
}

}  // namespace

double positivity_threshold(const VitalRates& rates, const Grid& grid) {
    double max_beta = 0.0;
    for (double s : grid.nodes)
        for (double y : grid.nodes) max_beta = std::max(max_beta, rates.beta(s, y));
    return 1e-12 * max_beta;
}

std::pair<bool, std::optional<double>> semigroup_irreducible(const VitalRates& rates,
                                                             const Grid& grid, double tol) {
    const std::size_t size = grid.size();
    // suffix_max[i][k] = max_{j >= k} beta(s_i, s_j)
    std::vector<double> suffix_max(size * size, 0.0);
    for (std::size_t i = 0; i < size; ++i) {
        double running = 0.0;
        for (std::size_t k = size; k-- > 0;) {
            running = std::max(running, rates.beta(grid.nodes[i], grid.nodes[k]));
            suffix_max[i * size + k] = running;
        }
    }
    for (std::size_t k = 1; k + 1 < size; ++k) {
        double best = 0.0;
        for (std::size_t i = 0; i <= k; ++i) best = std::max(best, suffix_max[i * size + k]);
        if (!(best > tol)) return {false, grid.nodes[k]};
    }
    return {true, std::nullopt};
}

double compute_R(const VitalRates& rates, const Grid& grid, double x, double tol) {
    std::size_t j0 = 0;
    while (j0 < grid.size() && grid.nodes[j0] < x - 1e-12) ++j0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = j0; j < grid.size(); ++j)
            if (rates.beta(grid.nodes[i], grid.nodes[j]) > tol) return grid.nodes[i];
    }
    return 1.0;
}

std::vector<double> r_iteration(const VitalRates& rates, const Grid& grid, double x0,
                                int max_n, double tol) {
    std::vector<double> trace{x0};
    double x = x0;
    for (int n = 0; n < max_n; ++n) {
        double next = compute_R(rates, grid, x, tol);
        if (next >= x) {  // stalled (includes the empty-strip marker R = 1)
            trace.push_back(x);
            break;
        }
        trace.push_back(next);
        x = next;
    }
    return trace;
}

std::pair<bool, std::vector<int>> L_irreducible_grid(const KernelMatrix& kernel, double tol) {
    PatternGraph graph{kernel.n, &kernel, tol};  // nodes 0..N-1
    const int n = graph.n;
    std::vector<char> seen(n, 0);
    std::vector<int> order;
    order.reserve(n);
    auto fwd = [&graph](int u, int j) { return graph.edge(u, j); };
    auto bwd = [&graph](int u, int j) { return graph.redge(u, j); };
    for (int v = 0; v < n; ++v)
        if (!seen[v]) dfs(v, fwd, n, seen, order);

    std::vector<int> component(n, -1);
    int n_components = 0;
    std::fill(seen.begin(), seen.end(), 0);
    for (int idx = n - 1; idx >= 0; --idx) {
        int v = order[idx];
        if (seen[v]) continue;
        std::vector<int> members;
        dfs(v, bwd, n, seen, members);
        for (int u : members) component[u] = n_components;
        ++n_components;
    }
    if (n_components == 1) return {true, {}};

    // Witness: a component with no edges leaving it (a closed set of the
    // positivity pattern).
    std::vector<char> has_out(n_components, 0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (component[i] != component[j] && graph.edge(j, i)) has_out[component[j]] = 1;
    int closed = 0;
    for (int c = 0; c < n_components; ++c)
        if (!has_out[c]) { closed = c; break; }
    std::vector<int> witness;
    for (int v = 0; v < n; ++v)
        if (component[v] == closed) witness.push_back(v);
    return {false, witness};
}

bool L_sufficient(const VitalRates& rates, const Grid& grid, double tol) {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = i; j < grid.size(); ++j)
            sum += grid.weights[j] * rates.beta(grid.nodes[i], grid.nodes[j]);
        if (!(sum > tol)) return false;
    }
    return true;
}

IrreducibilityReport analyze_irreducibility(const VitalRates& rates, const FlowCache& cache,
                                            const Grid& grid) {
    IrreducibilityReport report;
    double tol = positivity_threshold(rates, grid);
    auto [semi, alpha] = semigroup_irreducible(rates, grid, tol);
    report.semigroup_irreducible = semi;
    report.witness_alpha = alpha;

    KernelMatrix kernel = build_L_lambda(rates, cache, grid, 0.0);
    double ktol = 0.0;
    for (double e : kernel.entries) ktol = std::max(ktol, e);
    auto [irr, witness] = L_irreducible_grid(kernel, 1e-12 * ktol);
    report.L_irreducible_grid = irr;
    report.witness_component = witness;

    report.L_sufficient = L_sufficient(rates, grid, tol);
    report.r_trace = r_iteration(rates, grid, 1.0 - grid.ds, 4 * grid.order(), tol);
    return report;
}

}  // namespace structpop
