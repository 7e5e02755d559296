#include "structpop/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "structpop/errors.hpp"
#include "structpop/spectral.hpp"

namespace structpop {

namespace {

struct Stage {
    Grid grid;
    FlowCache cache;
    AgeKernelSet kernels;

    Stage(const VitalRates& rates, int n, int m)
        : grid(make_grid(n)),
          cache(rates, 4096),
          kernels(build_age_kernels(rates, cache, grid, m)) {}
};

std::vector<double> renewal_record_times(const Stage& stage, double T) {
    int n_steps = std::max(1, static_cast<int>(std::lround(T / stage.kernels.dt)));
    std::vector<double> times(n_steps + 1);
    for (int k = 0; k <= n_steps; ++k) times[k] = k * stage.kernels.dt;
    return times;
}

double l1_gap(const Grid& grid, std::span<const double> a, std::span<const double> b) {
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) gap += grid.weights[i] * std::abs(a[i] - b[i]);
    return gap;
}

}  // namespace

void EquivalenceReport::finalize(double tol) {
    tolerance = tol;
    ratio = sup_fine > 0.0 ? sup_coarse / sup_fine
                           : std::numeric_limits<double>::infinity();
    pass = sup_coarse <= tol;
}

VitalRates rescale_to_critical(const VitalRates& rates, const Grid& grid) {
    FlowCache cache(rates);
    SpectralResult spec = spectral_radius(build_L_lambda(rates, cache, grid, 0.0), grid);
    if (!(spec.radius > 0.0))
        throw Error(ErrorCode::NotCritical, "r(L) = 0; the model cannot be rescaled");
    return scale_beta(rates, 1.0 / spec.radius);
}

// ---------------------------------------------------------------------------
// Intertwining: K S(t) phi against the upwind PDE from K phi.

namespace {

double intertwining_sup(const VitalRates& rates, const HistoryFn& phi_fn, int n, int m,
                        double T_factor, std::vector<std::pair<double, double>>* table) {
    Stage stage(rates, n, m);
    double T = T_factor * stage.cache.Gamma();
    BirthHistory phi = sample_history(stage.grid, m, stage.cache.Gamma(), phi_fn);
    Density p0 = apply_K(stage.cache, stage.grid, phi);
    double p0_norm = norm_l1(stage.grid, p0.values);

    BirthTrajectory traj = solve_renewal(stage.kernels, stage.grid, phi, T);
    UpwindOptions options;
    options.record_times = renewal_record_times(stage, T);
    DensityTrajectory pde = solve_pde_upwind(rates, stage.grid, p0, T, options);

    double sup = 0.0;
    for (std::size_t k = 0; k < options.record_times.size(); ++k) {
        Density p_delay =
            apply_K(stage.cache, stage.grid, shift_segment(traj, options.record_times[k]));
        double gap = l1_gap(stage.grid, p_delay.values, pde.columns[k].values) / p0_norm;
        sup = std::max(sup, gap);
        if (table) table->emplace_back(options.record_times[k], gap);
    }
    return sup;
}

}  // namespace

EquivalenceReport run_intertwining(const VitalRates& rates, const HistoryFn& phi,
                                   const ExperimentOptions& options, double tolerance) {
    EquivalenceReport report;
    report.experiment = "intertwining";
    report.n_coarse = options.n;
    report.m_coarse = options.m;
    double T_factor = options.T > 0 ? options.T : 3.0;
    report.T = T_factor;
    report.sup_coarse =
        intertwining_sup(rates, phi, options.n, options.m, T_factor, &report.table);
    if (options.refine)
        report.sup_fine =
            intertwining_sup(rates, phi, 2 * options.n, 2 * options.m, T_factor, nullptr);
    report.finalize(tolerance);
    return report;
}

// ---------------------------------------------------------------------------
// Birth extraction: renewal b against C applied to the PDE solution.

namespace {

double birth_extraction_sup(const VitalRates& rates, const HistoryFn& phi_fn, int n, int m,
                            double T_factor, const std::string& scheme,
                            std::vector<std::pair<double, double>>* table) {
    Stage stage(rates, n, m);
    double T = T_factor * stage.cache.Gamma();
    BirthHistory phi = sample_history(stage.grid, m, stage.cache.Gamma(), phi_fn);
    Density p0 = apply_K(stage.cache, stage.grid, phi);

    BirthTrajectory traj = solve_renewal(stage.kernels, stage.grid, phi, T);
    std::vector<double> times = renewal_record_times(stage, T);
    DensityTrajectory pde;
    if (scheme == "voc") {
        pde = solve_pde_voc(stage.cache, stage.grid, stage.kernels, p0, T);
    } else {
        UpwindOptions options;
        options.record_times = times;
        pde = solve_pde_upwind(rates, stage.grid, p0, T, options);
    }

    double scale = 0.0;
    for (int k = 0; k <= traj.n_steps; ++k) {
        double norm = 0.0;
        auto col = traj.col(k);
        for (std::size_t i = 0; i < col.size(); ++i)
            norm += stage.grid.weights[i] * std::abs(col[i]);
        scale = std::max(scale, norm);
    }
    if (scale == 0.0) scale = 1.0;

    double sup = 0.0;
    std::vector<double> extracted(stage.grid.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        stage.kernels.recruitment.apply(pde.columns[k].values, extracted);
        double gap = l1_gap(stage.grid, traj.col(static_cast<int>(k)), extracted) / scale;
        sup = std::max(sup, gap);
        if (table) table->emplace_back(times[k], gap);
    }
    return sup;
}

}  // namespace

EquivalenceReport run_birth_extraction(const VitalRates& rates, const HistoryFn& phi,
                                       const ExperimentOptions& options, double tolerance,
                                       const std::string& scheme) {
    EquivalenceReport report;
    report.experiment = "birth_extraction_" + scheme;
    report.n_coarse = options.n;
    report.m_coarse = options.m;
    double T_factor = options.T > 0 ? options.T : 3.0;
    report.T = T_factor;
    report.sup_coarse = birth_extraction_sup(rates, phi, options.n, options.m, T_factor,
                                             scheme, &report.table);
    if (options.refine)
        report.sup_fine = birth_extraction_sup(rates, phi, 2 * options.n, 2 * options.m,
                                               T_factor, scheme, nullptr);
    report.finalize(tolerance);
    return report;
}

// ---------------------------------------------------------------------------
// Steady states, both directions of the equivalence theorem.

namespace {

std::pair<double, double> steady_state_gaps(const VitalRates& given, int n, int m,
                                            bool auto_rescale,
                                            std::vector<std::pair<double, double>>* table) {
    VitalRates rates =
        auto_rescale ? rescale_to_critical(given, make_grid(n)) : given;
    Stage stage(rates, n, m);
    SpectralResult spec =
        spectral_radius(build_L_lambda(rates, stage.cache, stage.grid, 0.0), stage.grid);
    if (std::abs(spec.radius - 1.0) > 1e-3)
        throw Error(ErrorCode::NotCritical,
                    "r(L) = " + std::to_string(spec.radius) +
                        "; rescale beta by 1/r(L) before the steady-state check");

    double T = 3.0 * stage.cache.Gamma();
    Density b_star = spec.eigvec;
    Density p_star = steady_state_from_b(rates, stage.cache, stage.grid, b_star);

    // Direction 1: the PDE holds p* (both schemes).
    std::vector<double> times = renewal_record_times(stage, T);
    UpwindOptions up_options;
    up_options.record_times = times;
    DensityTrajectory up = solve_pde_upwind(rates, stage.grid, p_star, T, up_options);
    DensityTrajectory voc = solve_pde_voc(stage.cache, stage.grid, stage.kernels, p_star, T);
    double gap1 = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        double g_up = l1_gap(stage.grid, up.columns[k].values, p_star.values);
        double g_voc = l1_gap(stage.grid, voc.columns[k].values, p_star.values);
        gap1 = std::max({gap1, g_up, g_voc});
        if (table) table->emplace_back(times[k], std::max(g_up, g_voc));
    }

    // Direction 2: the constant history C p* is a renewal fixed point.
    Density cp = stage.kernels.recruitment.apply(p_star);
    BirthHistory phi_bar = sample_history(
        stage.grid, m, stage.cache.Gamma(),
        [&](double s, double) { return cp[static_cast<std::size_t>(std::lround(
                                    s / stage.grid.ds))]; });
    BirthTrajectory traj = solve_renewal(stage.kernels, stage.grid, phi_bar, T);
    double gap2 = 0.0;
    for (int k = 0; k <= traj.n_steps; ++k)
        gap2 = std::max(gap2, l1_gap(stage.grid, traj.col(k), cp.values));
    return {gap1, gap2};
}

}  // namespace

EquivalenceReport run_steady_state_check(const VitalRates& rates,
                                         const ExperimentOptions& options,
                                         double tol_direction1, double tol_direction2) {
    EquivalenceReport report;
    report.experiment = "steady_state";
    report.n_coarse = options.n;
    report.m_coarse = options.m;
    report.T = 3.0;
    auto [gap1, gap2] =
        steady_state_gaps(rates, options.n, options.m, options.auto_rescale, &report.table);
    report.direction1 = gap1;
    report.direction2 = gap2;
    report.sup_coarse = std::max(gap1, gap2);
    if (options.refine) {
        auto [f1, f2] = steady_state_gaps(rates, 2 * options.n, 2 * options.m,
                                          options.auto_rescale, nullptr);
        report.sup_fine = std::max(f1, f2);
    }
    report.finalize(std::max(tol_direction1, tol_direction2));
    report.pass = gap1 <= tol_direction1 && gap2 <= tol_direction2;
    return report;
}

// ---------------------------------------------------------------------------
// Range inclusion: T(t) psi against K(theta -> L(t+theta) psi), t >= Gamma.

namespace {

double range_inclusion_gap(const VitalRates& rates, const DensityFn& psi_fn,
                           double t_over_gamma, int n, int m) {
    Stage stage(rates, n, m);
    double gamma_h = stage.cache.Gamma();
    double t = t_over_gamma * gamma_h;
    if (t < gamma_h - 1e-12)
        throw Error(ErrorCode::OutOfWindow, "range inclusion needs t >= Gamma");
    int k0 = static_cast<int>(std::lround(t / stage.kernels.dt));
    t = k0 * stage.kernels.dt;

    Density psi = sample_density(stage.grid, psi_fn);
    double psi_norm = norm_l1(stage.grid, psi.values);

    DensityTrajectory voc = solve_pde_voc(stage.cache, stage.grid, stage.kernels, psi, t);
    const Density& lhs = voc.columns.back();

    ResolventKernel resolvent = build_resolvent_kernel(stage.kernels, stage.grid, t);
    std::vector<Density> ell = resolvent.actions(psi);
    BirthHistory history;
    history.n_size = stage.grid.order();
    history.n_time = m;
    history.dt = stage.kernels.dt;
    history.values.resize(stage.grid.size() * (m + 1));
    for (int c = 0; c <= m; ++c) {
        const Density& src = ell[k0 - m + c];
        std::copy(src.values.begin(), src.values.end(), history.col(c).begin());
    }
    Density rhs = apply_K(stage.cache, stage.grid, history);
    return l1_gap(stage.grid, lhs.values, rhs.values) / psi_norm;
}

}  // namespace

EquivalenceReport run_range_inclusion(const VitalRates& rates, const DensityFn& psi,
                                      double t_over_gamma,
                                      const ExperimentOptions& options, double tolerance) {
    EquivalenceReport report;
    report.experiment = "range_inclusion";
    report.n_coarse = options.n;
    report.m_coarse = options.m;
    report.T = t_over_gamma;
    report.sup_coarse = range_inclusion_gap(rates, psi, t_over_gamma, options.n, options.m);
    report.table.emplace_back(t_over_gamma, report.sup_coarse);
    if (options.refine)
        report.sup_fine =
            range_inclusion_gap(rates, psi, t_over_gamma, 2 * options.n, 2 * options.m);
    report.finalize(tolerance);
    return report;
}

// ---------------------------------------------------------------------------
// Thieme sign sweep.

namespace {

struct FittedRates {
    double pde = 0.0;
    double renewal = 0.0;
};

FittedRates fitted_rates(const VitalRates& rates, int n, int m, double T_factor) {
    Stage stage(rates, n, m);
    double gamma_h = stage.cache.Gamma();
    double T = T_factor * gamma_h;
    BirthHistory phi =
        sample_history(stage.grid, m, gamma_h, [](double, double) { return 1.0; });
    BirthTrajectory traj = solve_renewal(stage.kernels, stage.grid, phi, T);

    Density p0 = apply_K(stage.cache, stage.grid, phi);
    UpwindOptions options;
    options.record_times = renewal_record_times(stage, T);
    options.renormalize = true;
    DensityTrajectory pde = solve_pde_upwind(rates, stage.grid, p0, T, options);

    FittedRates fitted;
    fitted.pde = growth_rate(pde, stage.grid, gamma_h);
    fitted.renewal = growth_rate(traj, stage.grid, gamma_h);
    return fitted;
}

int sign_class(double value, double band) {
    if (std::abs(value) <= band) return 0;
    return value > 0 ? 1 : -1;
}

}  // namespace

SignSweepReport run_sign_sweep(const VitalRates& rates, const std::vector<double>& thetas,
                               const ExperimentOptions& options) {
    SignSweepReport report;
    report.all_consistent = true;
    Grid grid = make_grid(options.n);
    double T_factor = options.T > 0 ? options.T : 6.0;

    for (double theta : thetas) {
        VitalRates scaled = scale_beta(rates, theta);
        FlowCache cache(scaled);
        SignSweepRow row;
        row.theta = theta;
        SpectralResult spec =
            spectral_radius(build_L_lambda(scaled, cache, grid, 0.0), grid);
        row.radius_minus_one = spec.radius - 1.0;
        try {
            row.lambda_star = solve_characteristic_root(scaled, cache, grid).lambda_star;
        } catch (const Error&) {
            row.lambda_star = std::numeric_limits<double>::quiet_NaN();
        }

        // Fit at (N, M) and (2N, 2M); Richardson removes the O(dt) bias.
        FittedRates coarse = fitted_rates(scaled, options.n, options.m, T_factor);
        FittedRates fine = fitted_rates(scaled, 2 * options.n, 2 * options.m, T_factor);
        row.pde_rate_raw = fine.pde;
        row.renewal_rate_raw = fine.renewal;
        row.pde_rate = 2.0 * fine.pde - coarse.pde;
        row.renewal_rate = 2.0 * fine.renewal - coarse.renewal;

        int s0 = sign_class(row.radius_minus_one, report.band);
        int s1 = std::isnan(row.lambda_star) ? -1 : sign_class(row.lambda_star, report.band);
        int s2 = sign_class(row.pde_rate, report.band);
        int s3 = sign_class(row.renewal_rate, report.band);
        row.signs_consistent = (s0 == s1 && s1 == s2 && s2 == s3);
        report.all_consistent = report.all_consistent && row.signs_consistent;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace structpop
