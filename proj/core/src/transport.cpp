#include "structpop/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "structpop/errors.hpp"

namespace structpop {

RecruitmentOperator::RecruitmentOperator(const VitalRates& rates, const Grid& grid)
    : n_(grid.order()) {
    entries_.resize(grid.size() * grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < grid.size(); ++j)
            entries_[i * grid.size() + j] =
                grid.weights[j] * rates.beta(grid.nodes[i], grid.nodes[j]);
}

void RecruitmentOperator::apply(std::span<const double> p, std::span<double> out) const {
    std::size_t n = static_cast<std::size_t>(n_) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = entries_.data() + i * n;
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += row[j] * p[j];
        out[i] = sum;
    }
}

Density RecruitmentOperator::apply(const Density& p) const {
    Density out(p.size());
    apply(p.values, out.values);
    return out;
}

// Boundary cases t == G(s) belong to the transported branch; the slack keeps
// that decision out of last-ulp roundoff when grid and age nodes coincide.
constexpr double kCutoffSlack = 1e-12;

Density apply_T0(const FlowCache& cache, const Grid& grid, double t, const Density& p) {
    if (t == 0.0) return p;
    Density out(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double s = grid.nodes[i];
        double gs = cache.G(s);
        if (t > gs + kCutoffSlack) continue;  // started below s = 0: nothing arrives
        double foot = cache.G_inverse(gs - t);
        double u = foot / grid.ds;
        int cell = std::min(static_cast<int>(u), grid.order() - 1);
        double w = u - cell;
        double value = (1 - w) * p[cell] + w * p[cell + 1];
        out[i] = value * cache.gamma_at(foot) / cache.gamma_at(s) *
                 std::exp(-std::max(0.0, cache.M(s) - cache.M(foot)));
    }
    return out;
}

Density apply_C(const VitalRates& rates, const Grid& grid, const Density& p) {
    return RecruitmentOperator(rates, grid).apply(p);
}

void TransportRecipe::apply(std::span<const double> p, std::span<double> out) const {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const Node& node = nodes[j];
        out[j] = node.alive ? node.factor * ((1.0 - node.w_right) * p[node.cell] +
                                             node.w_right * p[node.cell + 1])
                            : 0.0;
    }
}

TransportRecipe make_transport_recipe(const VitalRates& rates, const FlowCache& cache,
                                      const Grid& grid, double age) {
    TransportRecipe recipe;
    recipe.age = age;
    recipe.nodes.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double s = grid.nodes[j];
        double gs = cache.G(s);
        if (age > gs + kCutoffSlack) continue;  // nilpotent branch
        double foot = cache.G_inverse(std::max(0.0, gs - age));
        TransportRecipe::Node node;
        double u = foot / grid.ds;
        node.cell = std::min(static_cast<int>(u), grid.order() - 1);
        node.w_right = u - node.cell;
        node.factor = rates.gamma(foot) / rates.gamma(s) *
                      std::exp(-std::max(0.0, cache.M(s) - cache.M(foot)));
        node.alive = true;
        recipe.nodes[j] = node;
    }
    return recipe;
}

AgeKernelSet build_age_kernels(const VitalRates& rates, const FlowCache& cache,
                               const Grid& grid, int n_ages) {
    if (n_ages < 8)
        throw Error(ErrorCode::GridTooCoarse, "need M >= 8, got " + std::to_string(n_ages));
    AgeKernelSet kernels;
    kernels.n_ages = n_ages;
    kernels.dt = cache.Gamma() / n_ages;
    kernels.gamma_horizon = cache.Gamma();
    kernels.recruitment = RecruitmentOperator(rates, grid);
    kernels.recipes.reserve(n_ages);
    for (int m = 1; m <= n_ages; ++m)
        kernels.recipes.push_back(make_transport_recipe(rates, cache, grid, m * kernels.dt));
    return kernels;
}

Density AgeKernelSet::apply_L0(int m, const Density& u) const {
    Density shifted(u.size());
    recipe(m).apply(u.values, shifted.values);
    return recruitment.apply(shifted);
}

Density apply_K(const FlowCache& cache, const Grid& grid, const BirthHistory& phi) {
    Density out(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double s = grid.nodes[i];
        double gs = cache.G(s);
        double ms = cache.M(s);
        // Trapezoid over the sub-grid x = s_0..s_i; phi read along the
        // backward characteristic through (s, 0).
        double sum = 0.0;
        for (std::size_t l = 0; l <= i; ++l) {
            double x = grid.nodes[l];
            double t = -std::max(0.0, gs - cache.G(x));
            double value = phi.interpolate(grid, x, t) *
                           std::exp(-std::max(0.0, ms - cache.M(x)));
            double w = (l == 0 || l == i) ? grid.ds / 2.0 : grid.ds;
            sum += w * value;
        }
        out[i] = sum / cache.gamma_at(s);
    }
    return out;
}

BirthHistory history_from_density(const VitalRates& rates, const FlowCache& cache,
                                  const Grid& grid, const Density& p0, int n_time,
                                  HistoryWeighting weighting) {
    BirthHistory phi;
    phi.n_size = grid.order();
    phi.n_time = n_time;
    phi.dt = cache.Gamma() / n_time;
    phi.values.assign(static_cast<std::size_t>(n_time + 1) * grid.size(), 0.0);

    auto p0_at = [&](double y) {
        double u = y / grid.ds;
        int cell = std::min(static_cast<int>(u), grid.order() - 1);
        double w = u - cell;
        return (1 - w) * p0[cell] + w * p0[cell + 1];
    };

    double worst = 0.0;
    for (int k = 0; k <= n_time; ++k) {
        double t = -cache.Gamma() + k * phi.dt;
        for (std::size_t l = 0; l < grid.size(); ++l) {
            double x = grid.nodes[l];
            auto forward = cache.flow_forward(-t, x);
            if (!forward) continue;  // ancestors would have left the domain
            double y = *forward;
            double mass = p0_at(y);
            if (mass <= 0.0) continue;
            double weight;
            if (weighting == HistoryWeighting::Uniform) {
                weight = 1.0 / y;
            } else {
                // survival(x,y) / int_0^y survival(x',y) dx' = e^{M(x)} / E(y)
                weight = std::exp(cache.M(x)) / cache.E(y);
            }
            double value = rates.gamma(y) * mass * weight /
                           std::exp(-std::max(0.0, cache.M(y) - cache.M(x)));
            phi.at(static_cast<int>(l), k) = value;
            worst = std::max(worst, value);
        }
    }
    if (!(worst < 1e12))
        throw Error(ErrorCode::DegenerateWeight,
                    "history values reached " + std::to_string(worst) +
                        "; p0 must vanish at size 0 for this weighting");
    return phi;
}

}  // namespace structpop
