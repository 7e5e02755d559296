// structpop: command-line front end for the structured-population solvers.
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include "structpop/config.hpp"
#include "structpop/csv.hpp"
#include "structpop/errors.hpp"
#include "structpop/harness.hpp"
#include "structpop/irreducibility.hpp"
#include "structpop/pde.hpp"
#include "structpop/renewal.hpp"
#include "structpop/spectral.hpp"
#include "structpop/transport.hpp"

using namespace structpop;

namespace {

struct GlobalArgs {
    std::string config_path;
    int n_override = 0;
    int m_override = 0;
    double t_override = 0.0;
    std::string out_dir = ".";
    bool renormalize = false;
    unsigned seed = 12345;
};

struct Loaded {
    RunConfig config;
    VitalRates rates;
    Grid grid;
    FlowCache cache;
    int m;
};

Loaded load(const GlobalArgs& args) {
    RunConfig config =
        args.config_path.empty() ? RunConfig{} : parse_config_file(args.config_path);
    if (args.n_override > 0) config.grid_n = args.n_override;
    if (args.m_override > 0) config.steps_m = args.m_override;
    if (args.t_override > 0) config.horizon = args.t_override;
    VitalRates rates = load_model(config.model);
    Grid grid = make_grid(config.grid_n);
    FlowCache cache(rates);
    return Loaded{config, std::move(rates), std::move(grid), std::move(cache),
                  config.time_steps()};
}

std::string out_path(const GlobalArgs& args, const std::string& name) {
    std::filesystem::create_directories(args.out_dir);
    return (std::filesystem::path(args.out_dir) / name).string();
}

const char* verdict_name(SignVerdict v) {
    switch (v) {
        case SignVerdict::Negative: return "negative";
        case SignVerdict::Zero: return "zero";
        case SignVerdict::Positive: return "positive";
    }
    return "?";
}

Density default_p0(const Loaded& run, const std::string& kind) {
    if (kind == "bump")
        return sample_density(run.grid, [](double s) {
            double d = (s - 0.3) / 0.15;
            double q = std::max(0.0, 1.0 - d * d);
            return q * q;
        });
    if (kind == "linear") return sample_density(run.grid, [](double s) { return s; });
    // "kone": the density the unit history generates through K
    BirthHistory phi = sample_history(run.grid, run.m, run.cache.Gamma(),
                                      [](double, double) { return 1.0; });
    return apply_K(run.cache, run.grid, phi);
}

int cmd_spectral(const GlobalArgs& args, double lambda, bool have_lambda,
                 const std::string& dump_path) {
    Loaded run = load(args);
    SignTestResult sign = sign_test(run.rates, run.cache, run.grid);
    std::printf("r(L)       = %.12g\n", sign.spectral.radius);
    std::printf("r(L) - 1   = %.12g\n", sign.margin);
    std::printf("sign(s(A)) = %s\n", verdict_name(sign.verdict));
    if (sign.mu_zero_warning)
        std::printf("note: mortality integrates to zero; the sign relation's hypothesis "
                    "(negative growth bound of the birth-free part) is not covered\n");
    if (!sign.spectral.converged)
        std::printf("warning: power iteration did not converge (residual %.3g)\n",
                    sign.spectral.residual);
    try {
        RootResult root = solve_characteristic_root(run.rates, run.cache, run.grid);
        std::printf("lambda*    = %.12g  (r(L_lambda*) = %.9g, %d evaluations)\n",
                    root.lambda_star, root.radius_at_root, root.evaluations);
    } catch (const Error& e) {
        std::printf("lambda*    = none (%s)\n", e.what());
    }
    if (have_lambda) {
        double r = spectral_radius(build_L_lambda(run.rates, run.cache, run.grid, lambda),
                                   run.grid)
                       .radius;
        std::printf("r(L_%g)    = %.12g\n", lambda, r);
    }
    if (!dump_path.empty()) {
        KernelMatrix kernel =
            build_L_lambda(run.rates, run.cache, run.grid, have_lambda ? lambda : 0.0);
        std::ostringstream os;
        write_kernel_csv(os, kernel);
        write_file(dump_path, os.str());
        std::printf("kernel written to %s\n", dump_path.c_str());
    }
    return 0;
}

VitalRates random_bump_field(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> center(0.0, 1.0), radius(0.15, 0.4),
        amplitude(0.5, 2.0);
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
    return rates;
}

int cmd_irreducibility(const GlobalArgs& args, int fuzz_count) {
    if (fuzz_count > 0) {
        std::mt19937_64 rng(args.seed);
        Grid grid = make_grid(64);
        int violations = 0;
        for (int trial = 0; trial < fuzz_count; ++trial) {
            VitalRates rates = random_bump_field(rng);
            FlowCache cache(rates);
            IrreducibilityReport report = analyze_irreducibility(rates, cache, grid);
            bool ok = (!report.L_sufficient || report.L_irreducible_grid) &&
                      (!report.L_irreducible_grid || report.semigroup_irreducible);
            if (!ok) ++violations;
        }
        std::printf("fuzz: %d models, %d implication violations\n", fuzz_count, violations);
        return violations == 0 ? 0 : 1;
    }

    Loaded run = load(args);
    IrreducibilityReport report = analyze_irreducibility(run.rates, run.cache, run.grid);
    std::printf("semigroup irreducible      : %s\n",
                report.semigroup_irreducible ? "yes" : "no");
    if (report.witness_alpha)
        std::printf("  failing alpha            : %.6g\n", *report.witness_alpha);
    std::printf("kernel pattern irreducible : %s\n",
                report.L_irreducible_grid ? "yes" : "no");
    if (!report.witness_component.empty())
        std::printf("  closed node set          : %zu nodes, first at s = %.6g\n",
                    report.witness_component.size(),
                    run.grid.nodes[report.witness_component.front()]);
    std::printf("row-integral condition     : %s\n", report.L_sufficient ? "yes" : "no");
    std::ostringstream os;
    os << "n,x\n";
    for (std::size_t i = 0; i < report.r_trace.size(); ++i)
        os << i << ',' << format_double(report.r_trace[i]) << '\n';
    std::string path = out_path(args, "r_iteration.csv");
    write_file(path, os.str());
    std::printf("R-iteration trace written to %s\n", path.c_str());
    return 0;
}

int cmd_simulate_pde(const GlobalArgs& args, const std::string& scheme,
                     const std::string& initial, const std::string& out_name) {
    Loaded run = load(args);
    double T = run.config.horizon > 0 ? run.config.horizon : 3.0 * run.cache.Gamma();
    Density p0 = default_p0(run, initial);
    DensityTrajectory traj;
    if (scheme == "voc") {
        AgeKernelSet kernels = build_age_kernels(run.rates, run.cache, run.grid, run.m);
        traj = solve_pde_voc(run.cache, run.grid, kernels, p0, T, args.renormalize);
    } else {
        UpwindOptions options;
        options.renormalize = args.renormalize;
        if (run.config.dt > 0) {
            int records = std::max(1, static_cast<int>(std::ceil(T / run.config.dt)));
            for (int k = 0; k <= records; ++k)
                options.record_times.push_back(k * T / records);
        }
        traj = solve_pde_upwind(run.rates, run.grid, p0, T, options);
    }
    std::ostringstream os;
    write_trajectory_csv(os, run.grid, traj);
    std::string path = out_path(args, out_name.empty() ? "traj_pde.csv" : out_name);
    write_file(path, os.str());
    std::printf("%s scheme, %zu snapshots, final mass %.9g; written to %s\n",
                traj.scheme.c_str(), traj.times.size(),
                norm_l1(run.grid, traj.columns.back().values), path.c_str());
    if (traj.scheme == "upwind")
        std::printf("max mass-balance residual per step: %.3g\n", traj.max_mass_residual);
    return 0;
}

int cmd_simulate_renewal(const GlobalArgs& args, const std::string& out_name) {
    Loaded run = load(args);
    double T = run.config.horizon > 0 ? run.config.horizon : 3.0 * run.cache.Gamma();
    AgeKernelSet kernels = build_age_kernels(run.rates, run.cache, run.grid, run.m);
    BirthHistory phi = sample_history(run.grid, run.m, run.cache.Gamma(),
                                      [](double, double) { return 1.0; });
    BirthTrajectory traj = solve_renewal(kernels, run.grid, phi, T);
    std::ostringstream os;
    write_trajectory_csv(os, run.grid, traj);
    std::string path = out_path(args, out_name.empty() ? "traj_renewal.csv" : out_name);
    write_file(path, os.str());
    double final_norm = 0.0;
    auto last = traj.col(traj.n_steps);
    for (std::size_t i = 0; i < run.grid.size(); ++i)
        final_norm += run.grid.weights[i] * std::abs(last[i]);
    std::printf("%d steps of dt = %.6g, final ||b||_1 = %.9g; written to %s\n",
                traj.n_steps, traj.dt, final_norm, path.c_str());
    return 0;
}

int cmd_steady_state(const GlobalArgs& args) {
    Loaded run = load(args);
    ExperimentOptions opt;
    opt.n = run.config.grid_n;
    opt.m = run.m;
    opt.refine = false;
    opt.auto_rescale = true;
    EquivalenceReport report = run_steady_state_check(run.rates, opt);
    std::printf("steady-state check (beta rescaled to criticality)\n");
    std::printf("  direction 1 (PDE holds p*)      : %.3e\n", report.direction1);
    std::printf("  direction 2 (renewal holds Cp*) : %.3e\n", report.direction2);
    std::printf("  %s\n", report.pass ? "PASS" : "FAIL");
    return report.pass ? 0 : 1;
}

int cmd_equivalence(const GlobalArgs& args, const std::string& experiment) {
    Loaded run = load(args);
    ExperimentOptions opt;
    opt.n = run.config.grid_n;
    opt.m = run.m;
    if (run.config.horizon > 0) opt.T = run.config.horizon / run.cache.Gamma();
    HistoryFn phi = [](double s, double th) {
        return 16.0 * s * s * (1 - s) * (1 - s) * (0.5 + 0.5 * std::cos(M_PI * th));
    };
    std::vector<EquivalenceReport> reports;
    bool all_pass = true;
    if (experiment == "intertwining" || experiment == "all")
        reports.push_back(run_intertwining(run.rates, phi, opt, 5e-2));
    if (experiment == "birth" || experiment == "all")
        reports.push_back(run_birth_extraction(run.rates, phi, opt, 5e-2));
    if (experiment == "steady" || experiment == "all") {
        ExperimentOptions sopt = opt;
        sopt.refine = false;
        sopt.auto_rescale = true;
        reports.push_back(run_steady_state_check(run.rates, sopt));
    }
    if (experiment == "range" || experiment == "all")
        reports.push_back(run_range_inclusion(
            run.rates, [](double s) { return 6.0 * s * (1 - s); }, 1.5, opt, 5e-2));
    if (experiment == "signs" || experiment == "all") {
        VitalRates critical = rescale_to_critical(run.rates, run.grid);
        ExperimentOptions sopt = opt;
        sopt.T = 16.0;
        SignSweepReport sweep = run_sign_sweep(critical, {0.5, 1.0, 2.0, 4.0}, sopt);
        std::ostringstream os;
        os << "theta,r_minus_1,lambda_star,pde_rate,renewal_rate,consistent\n";
        for (const auto& row : sweep.rows)
            os << format_double(row.theta) << ',' << format_double(row.radius_minus_one)
               << ',' << format_double(row.lambda_star) << ','
               << format_double(row.pde_rate) << ',' << format_double(row.renewal_rate)
               << ',' << (row.signs_consistent ? 1 : 0) << '\n';
        std::string path = out_path(args, "signs.csv");
        write_file(path, os.str());
        std::printf("sign sweep: %s (table in %s)\n",
                    sweep.all_consistent ? "consistent" : "INCONSISTENT", path.c_str());
        all_pass = all_pass && sweep.all_consistent;
    }
    for (const auto& report : reports) {
        std::printf("%-22s sup %.3e (tol %.1e, ratio %.2f)  %s\n",
                    report.experiment.c_str(), report.sup_coarse, report.tolerance,
                    report.ratio, report.pass ? "PASS" : "FAIL");
        all_pass = all_pass && report.pass;
    }
    if (!reports.empty()) {
        std::ostringstream os;
        write_report_csv(os, reports);
        std::string path = out_path(args, "report.csv");
        write_file(path, os.str());
        std::printf("summary written to %s\n", path.c_str());
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structured-population solvers: transport PDE and renewal formulations"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand name
    GlobalArgs args;
    app.add_option("--config", args.config_path, "model/grid/run configuration file");
    app.add_option("--N", args.n_override, "size-grid cells (overrides config)");
    app.add_option("--M", args.m_override, "history/time steps (overrides config)");
    app.add_option("--T", args.t_override, "time horizon (overrides config)");
    app.add_option("--out", args.out_dir, "output directory");
    app.add_option("--seed", args.seed, "seed for randomized checks");
    app.add_flag("--renormalize", args.renormalize, "divide by mass each Gamma");

    auto* spectral_cmd = app.add_subcommand("spectral", "radius, root and sign verdict");
    double lambda = 0.0;
    auto* lambda_opt = spectral_cmd->add_option("--lambda", lambda, "extra shift to report");
    std::string dump_path;
    spectral_cmd->add_option("--dump-kernel", dump_path, "write the kernel matrix CSV");

    auto* irr_cmd = app.add_subcommand("irreducibility", "irreducibility verdicts");
    int fuzz_count = 0;
    irr_cmd->add_option("--fuzz", fuzz_count, "run the randomized implication check");

    auto* pde_cmd = app.add_subcommand("simulate-pde", "integrate the transport PDE");
    std::string scheme = "upwind";
    pde_cmd->add_option("--scheme", scheme, "upwind|voc")
        ->check(CLI::IsMember({"upwind", "voc"}));
    std::string initial = "kone";
    pde_cmd->add_option("--initial", initial, "kone|bump|linear")
        ->check(CLI::IsMember({"kone", "bump", "linear"}));
    std::string pde_out;
    pde_cmd->add_option("--out-file", pde_out, "trajectory CSV name");

    auto* renewal_cmd =
        app.add_subcommand("simulate-renewal", "integrate the renewal equation");
    std::string renewal_out;
    renewal_cmd->add_option("--out-file", renewal_out, "trajectory CSV name");

    auto* equiv_cmd = app.add_subcommand("equivalence", "equivalence experiments");
    std::string experiment = "all";
    equiv_cmd
        ->add_option("--experiment", experiment, "intertwining|birth|steady|range|signs|all")
        ->check(CLI::IsMember({"intertwining", "birth", "steady", "range", "signs", "all"}));

    auto* steady_cmd =
        app.add_subcommand("steady-state", "steady-state equivalence at criticality");

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectral_cmd->parsed())
            return cmd_spectral(args, lambda, lambda_opt->count() > 0, dump_path);
        if (irr_cmd->parsed()) return cmd_irreducibility(args, fuzz_count);
        if (pde_cmd->parsed()) return cmd_simulate_pde(args, scheme, initial, pde_out);
        if (renewal_cmd->parsed()) return cmd_simulate_renewal(args, renewal_out);
        if (equiv_cmd->parsed()) return cmd_equivalence(args, experiment);
        if (steady_cmd->parsed()) return cmd_steady_state(args);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
