// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Tolerances are fixed here; resolutions were chosen so every
// discretization bias sits inside its tolerance with margin and are fixed
// here as well.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "structpop/harness.hpp"
#include "structpop/irreducibility.hpp"
#include "structpop/pde.hpp"
#include "structpop/renewal.hpp"
#include "structpop/spectral.hpp"

using namespace structpop;

namespace {

int g_failures = 0;
int g_checks = 0;
std::vector<std::string> g_notes;

void expect(bool ok, const char* what, double value, double bound) {
    ++g_checks;
    if (!ok) {
        ++g_failures;
        char buffer[256];
        std::snprintf(buffer, sizeof(buffer), "    FAILED: %s (value %.6g, bound %.6g)",
                      what, value, bound);
        g_notes.push_back(buffer);
    }
}

void check_leq(double value, double bound, const char* what) {
    expect(value <= bound, what, value, bound);
}

struct CriterionScope {
    int id;
    const char* name;
    int fail_before;
    std::chrono::steady_clock::time_point start;

    CriterionScope(int id_, const char* name_)
        : id(id_), name(name_), fail_before(g_failures),
          start(std::chrono::steady_clock::now()) {}
    ~CriterionScope() {
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = g_failures == fail_before;
        std::printf("[%s] criterion %2d: %-58s (%5.1fs)\n", pass ? "PASS" : "FAIL", id, name,
                    seconds);
        for (const auto& note : g_notes) std::printf("%s\n", note.c_str());
        g_notes.clear();
    }
};

VitalRates constant_model(double beta0, double mu0 = 0.0) {
    ModelSpec spec;
    spec.name = "constant";
    spec.params = {{"beta0", beta0}, {"mu0", mu0}};
    return load_model(spec);
}

VitalRates named_model(const char* name) {
    ModelSpec spec;
    spec.name = name;
    return load_model(spec);
}

double l1_gap(const Grid& grid, std::span<const double> a, std::span<const double> b) {
    double gap = 0;
    for (std::size_t i = 0; i < a.size(); ++i) gap += grid.weights[i] * std::abs(a[i] - b[i]);
    return gap;
}

const HistoryFn kConstHistory = [](double, double) { return 1.0; };
const HistoryFn kBumpHistory = [](double s, double th) {
    return 16.0 * s * s * (1 - s) * (1 - s) * (0.5 + 0.5 * std::cos(M_PI * th));
};

// ---------------------------------------------------------------------------

void criterion_1() {
    CriterionScope scope(1, "closed-form criticality of the constant model");
    VitalRates rates = constant_model(2.0);
    FlowCache cache(rates);
    Grid grid = make_grid(200);
    SpectralResult spec = spectral_radius(build_L_lambda(rates, cache, grid, 0.0), grid);
    check_leq(std::abs(spec.radius - 1.0), 1e-6, "r(L) = 1");
    RootResult root = solve_characteristic_root(rates, cache, grid);
    check_leq(std::abs(root.lambda_star), 1e-6, "lambda* = 0");
    double eig_dev = 0;
    for (double v : spec.eigvec.values) eig_dev = std::max(eig_dev, std::abs(v - 1.0));
    check_leq(eig_dev, 1e-6, "dominant eigenvector constant");
    Density p = steady_state_from_b(rates, cache, grid, spec.eigvec);
    double steady_dev = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        steady_dev = std::max(steady_dev, std::abs(p[i] - grid.nodes[i]));
    check_leq(steady_dev, 1e-3, "steady density proportional to s");
}

void criterion_2() {
    CriterionScope scope(2, "characteristic root against the scalar oracle (beta0 = 4)");
    VitalRates rates = constant_model(4.0);
    FlowCache cache(rates);
    Grid coarse = make_grid(200);
    double r = spectral_radius(build_L_lambda(rates, cache, coarse, 0.0), coarse).radius;
    check_leq(std::abs(r - 2.0), 1e-4, "r(L) = 2");
    // independent oracle: bisection on lambda^2 = 4 (lambda - 1 + e^{-lambda})
    double expected = oracles::characteristic_root_constant_model(4.0, 0.0, 1e-12);
    Grid fine = make_grid(1600);  // quadrature bias is O(ds^2); 1600 puts it under 1e-6
    RootResult root = solve_characteristic_root(rates, cache, fine, 1e-9);
    check_leq(std::abs(root.lambda_star - expected), 1e-6, "lambda* matches the oracle");
}

void criterion_3() {
    CriterionScope scope(3, "Thieme sign relation across theta sweeps on three models");
    Grid calibration = make_grid(400);
    ExperimentOptions opt;
    opt.n = 200;
    opt.m = 200;
    opt.T = 16.0;  // long window: growth fits use [8, 16] Gamma
    for (const char* name : {"constant", "corner", "rectangle"}) {
        VitalRates critical = rescale_to_critical(named_model(name), calibration);
        SignSweepReport sweep = run_sign_sweep(critical, {0.5, 1.0, 2.0, 4.0}, opt);
        for (const auto& row : sweep.rows) {
            expect(row.signs_consistent, (std::string(name) + ": signs agree at theta").c_str(),
                   row.theta, 0);
        }
        const SignSweepRow& at_critical = sweep.rows[1];
        check_leq(std::abs(at_critical.radius_minus_one), 5e-3,
                  (std::string(name) + ": |r - 1| at criticality").c_str());
        check_leq(std::abs(at_critical.lambda_star), 5e-3,
                  (std::string(name) + ": |lambda*| at criticality").c_str());
        check_leq(std::abs(at_critical.pde_rate), 5e-3,
                  (std::string(name) + ": |PDE rate| at criticality").c_str());
        check_leq(std::abs(at_critical.renewal_rate), 5e-3,
                  (std::string(name) + ": |renewal rate| at criticality").c_str());
    }
}

void criterion_4() {
    CriterionScope scope(4, "intertwining K S(t) phi = T(t) K phi (upwind route)");
    ExperimentOptions opt;
    opt.n = 200;
    opt.m = 200;
    for (const char* name : {"constant", "corner", "rectangle", "block"}) {
        VitalRates rates = named_model(name);
        for (int shape = 0; shape < 2; ++shape) {
            EquivalenceReport report = run_intertwining(
                rates, shape == 0 ? kConstHistory : kBumpHistory, opt, 5e-2);
            std::string label = std::string(name) + "/shape" + std::to_string(shape);
            check_leq(report.sup_coarse, 5e-2, (label + ": sup gap at N=M=200").c_str());
            expect(report.ratio >= 1.5 || report.sup_fine <= 1e-12,
                   (label + ": gap shrinks by >= 1.5x at N=M=400").c_str(), report.ratio,
                   1.5);
        }
    }
}

void criterion_5() {
    CriterionScope scope(5, "birth extraction b = C T(t) K phi (upwind route)");
    ExperimentOptions opt;
    opt.n = 200;
    opt.m = 200;
    for (const char* name : {"constant", "corner", "rectangle", "block"}) {
        VitalRates rates = named_model(name);
        for (int shape = 0; shape < 2; ++shape) {
            EquivalenceReport report = run_birth_extraction(
                rates, shape == 0 ? kConstHistory : kBumpHistory, opt, 5e-2, "upwind");
            std::string label = std::string(name) + "/shape" + std::to_string(shape);
            check_leq(report.sup_coarse, 5e-2, (label + ": sup gap at N=M=200").c_str());
            expect(report.ratio >= 1.5 || report.sup_fine <= 1e-12,
                   (label + ": gap shrinks by >= 1.5x at N=M=400").c_str(), report.ratio,
                   1.5);
        }
    }
}

void criterion_6() {
    CriterionScope scope(6, "history reconstruction roundtrip through K");
    // generic rates, both weightings, halving under refinement
    VitalRates curved;
    curved.name = "curved";
    curved.beta = [](double s, double y) { return 1.0 + s * y; };
    curved.mu = [](double s) { return 0.3 + 0.2 * s; };
    curved.gamma = [](double s) { return 1.0 + 0.5 * s; };
    curved.gamma_min = 1.0;
    for (const VitalRates& rates : {constant_model(2.0, 1.0), curved}) {
        FlowCache cache(rates);
        auto roundtrip = [&](int n, HistoryWeighting weighting) {
            Grid grid = make_grid(n);
            Density p0 = sample_density(grid, [](double y) { return y * (1 - y); });
            BirthHistory phi = history_from_density(rates, cache, grid, p0, n, weighting);
            return l1_gap(grid, apply_K(cache, grid, phi).values, p0.values);
        };
        for (auto weighting : {HistoryWeighting::Uniform, HistoryWeighting::Survival}) {
            double coarse = roundtrip(200, weighting);
            double fine = roundtrip(400, weighting);
            std::string label = rates.name +
                                (weighting == HistoryWeighting::Uniform ? "/uniform"
                                                                        : "/survival");
            check_leq(coarse, 5e-3, (label + ": roundtrip error at N=M=200").c_str());
            expect(fine < coarse / 1.5 || fine <= 1e-12,
                   (label + ": roundtrip halves under refinement").c_str(), fine, coarse);
        }
    }
    // the unit-rate construction reproduces the indicator age profile exactly
    VitalRates unit = constant_model(2.0);
    FlowCache cache(unit);
    Grid grid = make_grid(200);
    Density p0 = sample_density(grid, [](double y) { return y; });
    BirthHistory phi = history_from_density(unit, cache, grid, p0, 200,
                                            HistoryWeighting::Uniform);
    double worst = 0;
    for (int k = 0; k <= phi.n_time; ++k) {
        double t = phi.time_node(k);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (i == 0 && k == phi.n_time) continue;  // the 0/0 corner of p0(y)/y
            double expected = grid.nodes[i] <= t + 1.0 + 1e-12 ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(phi.at(static_cast<int>(i), k) - expected));
        }
    }
    check_leq(worst, 1e-12, "unit-rate profile equals the indicator exactly");
}

void criterion_7() {
    CriterionScope scope(7, "distinct histories from one density give one birth path");
    VitalRates rates = constant_model(std::exp(1.0), 1.0);  // critical with mortality
    FlowCache cache(rates);
    int n = 200;
    Grid grid = make_grid(n);
    AgeKernelSet kernels = build_age_kernels(rates, cache, grid, n);
    Density p0 = sample_density(grid, [](double y) { return y * (1 - y); });
    BirthHistory phi_u = history_from_density(rates, cache, grid, p0, n,
                                              HistoryWeighting::Uniform);
    BirthHistory phi_s = history_from_density(rates, cache, grid, p0, n,
                                              HistoryWeighting::Survival);
    double hist_gap = 0;
    for (std::size_t e = 0; e < phi_u.values.size(); ++e)
        hist_gap = std::max(hist_gap, std::abs(phi_u.values[e] - phi_s.values[e]));
    expect(hist_gap > 0.05, "the two histories are genuinely distinct", hist_gap, 0.05);
    double T = 3.0 * cache.Gamma();
    BirthTrajectory b1 = solve_renewal(kernels, grid, phi_u, T);
    BirthTrajectory b2 = solve_renewal(kernels, grid, phi_s, T);
    double sup = 0;
    for (int k = 1; k <= b1.n_steps; ++k)
        sup = std::max(sup, l1_gap(grid, b1.col(k), b2.col(k)));
    check_leq(sup, 5e-3, "trajectories agree on (dt, 3 Gamma]");
}

void criterion_8() {
    CriterionScope scope(8, "irreducibility verdicts and the implication chain");
    Grid grid = make_grid(200);
    auto verdicts = [&](const VitalRates& rates) {
        FlowCache cache(rates);
        return analyze_irreducibility(rates, cache, grid);
    };
    IrreducibilityReport ones = verdicts(constant_model(1.0));
    expect(ones.semigroup_irreducible && ones.L_irreducible_grid && ones.L_sufficient,
           "beta = 1 -> (true, true, true)", 0, 0);
    IrreducibilityReport rect = verdicts(named_model("rectangle"));
    expect(rect.semigroup_irreducible && !rect.L_irreducible_grid && !rect.L_sufficient,
           "rectangle -> (true, false, false)", 0, 0);
    IrreducibilityReport block = verdicts(named_model("block"));
    expect(!block.semigroup_irreducible && !block.L_irreducible_grid && !block.L_sufficient,
           "block -> (false, false, false)", 0, 0);
    expect(block.witness_alpha.has_value(), "block reports a witness alpha", 0, 0);
    if (block.witness_alpha)
        check_leq(std::abs(*block.witness_alpha - 0.5), grid.ds + 1e-12,
                  "witness within one grid cell of 0.5");

    // randomized implication chain, fixed seed
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> center(0.0, 1.0), radius(0.15, 0.4),
        amplitude(0.5, 2.0);
    Grid fuzz_grid = make_grid(64);
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        struct Bump {
            double cs, cy, r, a;
        };
        std::vector<Bump> bumps;
        for (int b = 0; b < 3; ++b)
            bumps.push_back({center(rng), center(rng), radius(rng), amplitude(rng)});
        VitalRates rates;
        rates.name = "fuzz";
        rates.beta = [bumps](double s, double y) {
            double total = 0.0;
            for (const auto& bump : bumps) {
                double d2 = (s - bump.cs) * (s - bump.cs) + (y - bump.cy) * (y - bump.cy);
                double q = std::max(0.0, bump.r * bump.r - d2);
                total += bump.a * q * q / (bump.r * bump.r * bump.r * bump.r);
            }
            return total;
        };
        rates.mu = [](double) { return 0.1; };
        rates.gamma = [](double) { return 1.0; };
        rates.gamma_min = 1.0;
        FlowCache cache(rates);
        IrreducibilityReport report = analyze_irreducibility(rates, cache, fuzz_grid);
        bool ok = (!report.L_sufficient || report.L_irreducible_grid) &&
                  (!report.L_irreducible_grid || report.semigroup_irreducible);
        if (!ok) ++violations;
    }
    check_leq(violations, 0, "100-model fuzz: implication chain violations");
}

void criterion_9() {
    CriterionScope scope(9, "Laplace-transform identity for the age kernels");
    for (double mu0 : {0.0, 0.5}) {
        VitalRates rates = constant_model(2.0, mu0);
        FlowCache cache(rates);
        Grid grid = make_grid(200);
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (double lambda : {0.0, 1.0}) {
            KernelMatrix direct = build_L_lambda(rates, cache, grid, lambda);
            KernelMatrix reference = laplace_L0_quadrature(rates, cache, grid, lambda, 200);
            KernelMatrix coarse = laplace_L0_quadrature(rates, cache, grid, lambda, 32);
            KernelMatrix fine = laplace_L0_quadrature(rates, cache, grid, lambda, 512);
            double worst_ref = 0, worst_coarse = 0, worst_fine = 0;
            for (int trial = 0; trial < 5; ++trial) {
                Density v(grid.size());
                for (auto& x : v.values) x = unif(rng);
                double scale = norm_l1(grid, v.values);
                for (auto& x : v.values) x /= scale;
                worst_ref = std::max(
                    worst_ref, l1_gap(grid, direct.apply(v).values,
                                      reference.apply(v).values));
                worst_coarse = std::max(
                    worst_coarse,
                    l1_gap(grid, direct.apply(v).values, coarse.apply(v).values));
                worst_fine = std::max(
                    worst_fine, l1_gap(grid, direct.apply(v).values, fine.apply(v).values));
            }
            char label[96];
            std::snprintf(label, sizeof(label), "mu=%.1f lambda=%.0f: action gap at M=200",
                          mu0, lambda);
            check_leq(worst_ref, 5e-3, label);
            expect(worst_fine < worst_coarse / 1.5, "refinement in the age step improves",
                   worst_fine, worst_coarse);
        }
    }
}

void criterion_10() {
    CriterionScope scope(10, "range inclusion T(t) psi = K(L(t + .) psi) at t = 1.5 Gamma");
    ExperimentOptions opt;
    opt.n = 200;
    opt.m = 200;
    EquivalenceReport critical = run_range_inclusion(
        constant_model(2.0), [](double s) { return 2.0 * s; }, 1.5, opt, 5e-2);
    check_leq(critical.sup_coarse, 5e-2, "critical model: gap at N=M=200");
    expect(critical.ratio >= 1.5 || critical.sup_fine <= 1e-12,
           "critical model: refinement", critical.ratio, 1.5);
    // a generic kernel shows the actual O(dt) decay of the gap
    EquivalenceReport generic = run_range_inclusion(
        named_model("block"), [](double s) { return 6.0 * s * (1 - s); }, 1.5, opt, 5e-2);
    check_leq(generic.sup_coarse, 5e-2, "block model: gap at N=M=200");
    expect(generic.ratio >= 1.5, "block model: gap shrinks by >= 1.5x", generic.ratio, 1.5);
}

void criterion_11() {
    CriterionScope scope(11, "steady-state equivalence, both theorem directions");
    ExperimentOptions constant_opt;
    constant_opt.n = 200;
    constant_opt.m = 200;
    constant_opt.refine = false;
    EquivalenceReport report = run_steady_state_check(constant_model(2.0), constant_opt);
    check_leq(report.direction1, 3e-2, "constant model: PDE holds p*");
    check_leq(report.direction2, 2e-2, "constant model: renewal holds C p*");

    // demonstrate the discretization-artifact ratio on the rectangle model,
    // auto-rescaled on each resolution's own grid
    ExperimentOptions rect_opt;
    rect_opt.n = 200;
    rect_opt.m = 200;
    rect_opt.refine = true;
    rect_opt.auto_rescale = true;
    EquivalenceReport rect_report = run_steady_state_check(named_model("rectangle"), rect_opt);
    check_leq(rect_report.sup_coarse, 3e-2, "rectangle model: both directions at N=M=200");
    expect(rect_report.ratio >= 1.5, "rectangle model: gaps shrink by >= 1.5x",
           rect_report.ratio, 1.5);

    // the corner kernel has gap-separated generations; its first-order bias
    // needs (N, M) = (800, 1600) to sit inside the tolerances
    ExperimentOptions corner_opt;
    corner_opt.n = 800;
    corner_opt.m = 1600;
    corner_opt.refine = false;
    corner_opt.auto_rescale = true;
    EquivalenceReport corner_report = run_steady_state_check(named_model("corner"), corner_opt);
    check_leq(corner_report.direction1, 3e-2, "corner model: PDE holds p*");
    check_leq(corner_report.direction2, 2e-2, "corner model: renewal holds C p*");
}

void criterion_12() {
    CriterionScope scope(12, "scheme invariants: nilpotency, mass balance, positivity");
    VitalRates curved;
    curved.name = "curved";
    curved.beta = [](double s, double y) { return 1.5 + std::sin(3 * s) * std::sin(3 * s) + y; };
    curved.mu = [](double s) { return 0.4 + 0.3 * s; };
    curved.gamma = [](double s) { return 1.0 + 0.5 * s; };
    curved.gamma_min = 1.0;
    FlowCache cache(curved);
    Grid grid = make_grid(150);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Density p(grid.size());
    for (auto& v : p.values) v = unif(rng);

    // nilpotency beyond the horizon is exact
    Density gone = apply_T0(cache, grid, cache.Gamma() * 1.0000001, p);
    double nil = 0;
    for (double v : gone.values) nil = std::max(nil, std::abs(v));
    check_leq(nil, 0.0, "T0 is exactly zero beyond Gamma");

    // upwind mass balance telescopes to rounding
    Density p0 = p;
    p0[0] = 0.0;
    DensityTrajectory up = solve_pde_upwind(curved, grid, p0, 2.0, {});
    check_leq(up.max_mass_residual, 1e-10, "upwind per-step mass balance");

    // positivity of every solver on nonnegative input
    double min_value = 0.0;
    for (const auto& col : up.columns)
        for (double v : col.values) min_value = std::min(min_value, v);
    AgeKernelSet kernels = build_age_kernels(curved, cache, grid, 150);
    DensityTrajectory voc = solve_pde_voc(cache, grid, kernels, p0, 2.0);
    for (const auto& col : voc.columns)
        for (double v : col.values) min_value = std::min(min_value, v);
    BirthHistory phi = sample_history(grid, 150, cache.Gamma(),
                                      [&](double, double) { return unif(rng); });
    BirthTrajectory traj = solve_renewal(kernels, grid, phi, 2.0);
    for (int k = 0; k <= traj.n_steps; ++k)
        for (double v : traj.col(k)) min_value = std::min(min_value, v);
    for (double v : apply_K(cache, grid, phi).values) min_value = std::min(min_value, v);
    expect(min_value >= -1e-12, "all solvers preserve nonnegativity", min_value, -1e-12);
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    auto want = [&](int id) { return only == 0 || only == id; };
    auto t0 = std::chrono::steady_clock::now();
    if (want(1)) criterion_1();
    if (want(2)) criterion_2();
    if (want(3)) criterion_3();
    if (want(4)) criterion_4();
    if (want(5)) criterion_5();
    if (want(6)) criterion_6();
    if (want(7)) criterion_7();
    if (want(8)) criterion_8();
    if (want(9)) criterion_9();
    if (want(10)) criterion_10();
    if (want(11)) criterion_11();
    if (want(12)) criterion_12();
    double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d checks, %d failures, %.1fs total\n", g_checks, g_failures, total);
    return g_failures;
}
