#include "structpop/pde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "structpop/errors.hpp"

namespace structpop {

namespace {

double quick_gamma_horizon(const VitalRates& rates) {
    // Simpson of 1/gamma on a fixed mesh; only used to pace renormalization.
    constexpr int kCells = 512;
    double h = 1.0 / kCells, sum = 0.0;
    for (int i = 0; i < kCells; ++i)
        sum += h / 6.0 *
               (1.0 / rates.gamma(i * h) + 4.0 / rates.gamma((i + 0.5) * h) +
                1.0 / rates.gamma((i + 1) * h));
    return sum;
}

void maybe_renormalize(std::vector<double>& p, const Grid& grid, double& log_factor) {
    double mass = norm_l1(grid, p);
    if (mass <= 0.0) return;
    for (double& v : p) v /= mass;
    log_factor += std::log(mass);
}

}  // namespace

DensityTrajectory solve_pde_upwind(const VitalRates& rates, const Grid& grid,
                                   const Density& p0, double T,
                                   const UpwindOptions& options) {
    if (!(options.cfl > 0.0) || options.cfl > 1.0)
        throw Error(ErrorCode::CflViolation, "cfl must be in (0,1], got " +
                                                 std::to_string(options.cfl));
    const std::size_t size = grid.size();
    std::vector<double> gamma_nodes(size), mu_nodes(size);
    double gmax = 0.0, mmax = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        gamma_nodes[i] = rates.gamma(grid.nodes[i]);
        mu_nodes[i] = rates.mu(grid.nodes[i]);
        gmax = std::max(gmax, gamma_nodes[i]);
        mmax = std::max(mmax, mu_nodes[i]);
    }
    gmax = std::max(gmax, gamma_max(rates));
    double dt_limit = options.cfl * grid.ds / gmax;
    if (mmax > 0.0) dt_limit = std::min(dt_limit, options.cfl / mmax);

    DensityTrajectory traj;
    traj.scheme = "upwind";
    RecruitmentOperator recruitment(rates, grid);
    double renorm_period = quick_gamma_horizon(rates);

    // Align the step so requested record times are hit exactly. Record
    // times must be uniform starting at 0 (every solver here asks for
    // renewal-grid snapshots or everything).
    std::vector<double> record = options.record_times;
    double dt;
    long substeps;
    if (record.empty()) {
        long n_steps = static_cast<long>(std::ceil(T / dt_limit - 1e-12));
        dt = T / static_cast<double>(n_steps);
        record.reserve(n_steps + 1);
        for (long k = 0; k <= n_steps; ++k) record.push_back(k * dt);
        substeps = 1;
    } else {
        if (record.front() != 0.0)
            throw Error(ErrorCode::OutOfWindow, "record times must start at 0");
        double spacing = record.size() > 1 ? record[1] - record[0] : T;
        for (std::size_t r = 1; r < record.size(); ++r)
            if (std::abs(record[r] - record[r - 1] - spacing) > 1e-9)
                throw Error(ErrorCode::OutOfWindow, "record times must be uniform");
        substeps = std::max(1L, static_cast<long>(std::ceil(spacing / dt_limit - 1e-12)));
        dt = spacing / substeps;
    }

    std::vector<double> p = p0.values, next(size), births(size);
    double log_factor = 0.0, next_renorm = renorm_period;
    traj.times.push_back(record.front());
    traj.columns.push_back(Density(p));
    traj.log_rescale.push_back(log_factor);

    double t = 0.0;
    for (std::size_t r = 1; r < record.size(); ++r) {
        for (long step = 0; step < substeps; ++step) {
            recruitment.apply(p, births);
            next[0] = 0.0;  // inflow boundary: gamma(0) p(0,t) = 0
            for (std::size_t i = 1; i < size; ++i) {
                double flux_out = gamma_nodes[i] * p[i];
                double flux_in = gamma_nodes[i - 1] * p[i - 1];
                next[i] = p[i] - dt / grid.ds * (flux_out - flux_in) -
                          dt * mu_nodes[i] * p[i] + dt * births[i];
            }
            // Exact telescoped balance of the update above.
            double change = 0.0, source = 0.0, sink = 0.0;
            for (std::size_t i = 1; i < size; ++i) {
                change += grid.weights[i] * (next[i] - p[i]);
                source += grid.weights[i] * births[i];
                sink += grid.weights[i] * mu_nodes[i] * p[i];
            }
            double outflux = 0.5 * (gamma_nodes[size - 2] * p[size - 2] +
                                    gamma_nodes[size - 1] * p[size - 1]) -
                             gamma_nodes[0] * p[0];
            double residual = std::abs(change - dt * (-outflux - sink + source));
            traj.max_mass_residual = std::max(traj.max_mass_residual, residual);
            p.swap(next);
            t += dt;
            if (options.renormalize && t >= next_renorm - 1e-12) {
                maybe_renormalize(p, grid, log_factor);
                next_renorm += renorm_period;
            }
        }
        t = record[r];
        traj.times.push_back(record[r]);
        traj.columns.push_back(Density(p));
        traj.log_rescale.push_back(log_factor);
    }
    return traj;
}

DensityTrajectory solve_pde_voc(const FlowCache& cache, const Grid& grid,
                                const AgeKernelSet& kernels, const Density& p0, double T,
                                bool renormalize) {
    const std::size_t size = grid.size();
    if (kernels.recipes.empty() || kernels.recipes.front().nodes.size() != size)
        throw Error(ErrorCode::StepMismatch, "kernel set was built on a different grid");
    const double dt = kernels.dt;
    DensityTrajectory traj;
    traj.scheme = "voc";
    int n_steps = std::max(1, static_cast<int>(std::lround(T / dt)));
    std::vector<double> p = p0.values, mixed(size), births(size);
    double log_factor = 0.0, next_renorm = cache.Gamma();
    traj.times.push_back(0.0);
    traj.columns.push_back(Density(p));
    traj.log_rescale.push_back(0.0);
    for (int k = 1; k <= n_steps; ++k) {
        kernels.recruitment.apply(p, births);
        for (std::size_t i = 0; i < size; ++i) mixed[i] = p[i] + dt * births[i];
        kernels.recipe(1).apply(mixed, p);
        if (renormalize && k * dt >= next_renorm - 1e-12) {
            maybe_renormalize(p, grid, log_factor);
            next_renorm += cache.Gamma();
        }
        traj.times.push_back(k * dt);
        traj.columns.push_back(Density(p));
        traj.log_rescale.push_back(log_factor);
    }
    return traj;
}

namespace {

double fitted_slope(const std::vector<double>& times, const std::vector<double>& log_norms) {
    // Least squares over the supplied window.
    double n = static_cast<double>(times.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        st += times[k];
        sy += log_norms[k];
        stt += times[k] * times[k];
        sty += times[k] * log_norms[k];
    }
    return (n * sty - st * sy) / (n * stt - st * st);
}

double growth_rate_impl(const std::vector<double>& times, const std::vector<double>& norms,
                        const std::vector<double>& log_rescale, double gamma_horizon) {
    if (times.size() < 4 || times.back() - times.front() < 4.0 * gamma_horizon - 1e-9)
        throw Error(ErrorCode::OutOfWindow, "growth fit needs a span of at least 4 Gamma");
    double t_mid = 0.5 * (times.front() + times.back());
    std::vector<double> ts, ys;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < t_mid) continue;
        double norm = norms[k];
        if (!(norm >= 1e-300) || !(norm <= 1e300))
            throw Error(ErrorCode::DegenerateTrajectory,
                        "norm " + std::to_string(norm) + " at t = " + std::to_string(times[k]) +
                            "; renormalize periodically");
        ts.push_back(times[k]);
        ys.push_back(std::log(norm) + (log_rescale.empty() ? 0.0 : log_rescale[k]));
    }
    return fitted_slope(ts, ys);
}

}  // namespace

double growth_rate(const DensityTrajectory& traj, const Grid& grid, double gamma_horizon) {
    std::vector<double> norms(traj.columns.size());
    for (std::size_t k = 0; k < traj.columns.size(); ++k)
        norms[k] = norm_l1(grid, traj.columns[k].values);
    return growth_rate_impl(traj.times, norms, traj.log_rescale, gamma_horizon);
}

double growth_rate(const BirthTrajectory& traj, const Grid& grid, double gamma_horizon) {
    std::vector<double> times(traj.n_steps + 1), norms(traj.n_steps + 1);
    for (int k = 0; k <= traj.n_steps; ++k) {
        times[k] = traj.time(k);
        auto col = traj.col(k);
        double sum = 0.0;
        for (std::size_t i = 0; i < col.size(); ++i) sum += grid.weights[i] * std::abs(col[i]);
        norms[k] = sum;
    }
    return growth_rate_impl(times, norms, {}, gamma_horizon);
}

}  // namespace structpop
