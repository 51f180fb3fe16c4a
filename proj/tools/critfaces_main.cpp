// Command-line surface for the critical-face simulator: run experiments,
// sweep intensities, tabulate the limit constants, and self-test against the
// brute-force oracles.

#include <chrono>
#include <cstdio>
#include <random>

#include <CLI11.hpp>

#include "critfaces/io.hpp"
#include "critfaces/persistence.hpp"
#include "critfaces/stats.hpp"

using namespace critfaces;

namespace {

double now_seconds() {
    using clk = std::chrono::steady_clock;
    return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

void print_report(const TheoryReport& report) {
    std::printf("%-24s %14s %14s %10s %7s %s\n", "statistic", "empirical", "target", "z",
                "pass", "kind");
    for (const auto& row : report.rows) {
        std::printf("%-24s %14.6g %14.6g %10.3f %7s %s\n", row.name.c_str(), row.empirical,
                    row.target, row.z, row.pass ? "ok" : "FAIL",
                    row.asymptotic ? "asymptotic" : "exact");
    }
}

int cmd_run(const std::string& config_path, std::uint64_t* seed, std::int64_t* trials,
            const std::string& out_dir) {
    ExperimentConfig cfg = parse_config_file(config_path);
    if (seed) cfg.master_seed = *seed;
    if (trials) cfg.trials = *trials;
    validate_config(cfg);

    double t0 = now_seconds();
    ExperimentResult result = run_experiment(cfg);
    double dt = now_seconds() - t0;

    std::printf("n=%g trials=%lld seed=%llu  (%.1fs)\n", result.params.n,
                static_cast<long long>(cfg.trials),
                static_cast<unsigned long long>(cfg.master_seed), dt);
    std::printf("a_n=%.6f R_n=%.6f r(u0)=%.6f b=%.6g u_max=%.4f\n", result.params.a_n,
                result.params.R_n, result.params.r_u0, result.params.b, result.params.u_max);
    std::printf("mean G=%.5f  G+=%.5f  G-(k+1)=%.5f  atoms=%lld\n", result.stats.G.mean,
                result.stats.G_pos.mean, result.stats.G_neg_next.mean,
                static_cast<long long>(result.stats.atom_total));
    print_report(result.report);

    if (!out_dir.empty()) {
        RunManifest manifest;
        manifest.config = cfg;
        manifest.Dk = result.Dk;
        manifest.wall_seconds = dt;
        write_results(result, manifest, out_dir);
        emit_plot_data(result, out_dir);
        std::printf("wrote %s/summary.json, atoms.csv, eta_bins.dat, plot.py\n",
                    out_dir.c_str());
    }
    return result.report.exact_rows_pass ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& n_list,
              std::uint64_t* seed, std::int64_t* trials, const std::string& out_dir) {
    ExperimentConfig cfg = parse_config_file(config_path);
    if (!n_list.empty()) cfg.n_list = n_list;
    if (seed) cfg.master_seed = *seed;
    if (trials) cfg.trials = *trials;
    validate_config(cfg);

    double t0 = now_seconds();
    SweepReport report = convergence_sweep(cfg);
    double dt = now_seconds() - t0;

    std::printf("target D_k e^{-u0} = %.6f (+- %.2g)\n", report.target, report.target_se);
    std::printf("%10s %10s %12s %12s %12s %12s %10s\n", "n", "b_kn", "P(G>=1)/b", "P(G+>=1)/b",
                "P(G-)>=1/b", "P(G>=2)/b", "diff_rate");
    for (const auto& c : report.cells) {
        std::printf("%10.0f %10.5f %12.4f %12.4f %12.4f %12.4f %10.4f\n", c.n, c.b,
                    c.pG1.p_hat / c.b, c.pGpos1.p_hat / c.b, c.pGneg1.p_hat / c.b,
                    c.pG2.p_hat / c.b, c.discrepancy_rate);
    }
    std::printf("final cell: covers=%d pos_covers=%d neg_covers=%d  P(G>=2)/b=%.4f  "
                "trend_down=%d  (%.1fs)\n",
                report.final_covers_target, report.final_pos_covers, report.final_neg_covers,
                report.final_pG2_over_b, report.discrepancy_trend_down, dt);

    if (!out_dir.empty()) {
        RunManifest manifest;
        manifest.config = cfg;
        manifest.wall_seconds = dt;
        write_sweep(report, cfg, manifest, out_dir);
        emit_plot_data(report, out_dir);
        std::printf("wrote %s/sweep.csv, sweep_summary.json, sweep_scaled_p.dat, plot.py\n",
                    out_dir.c_str());
    }
    return report.final_covers_target ? 0 : 1;
}

int cmd_constants(int d, int k, std::uint64_t samples, std::uint64_t seed) {
    if (k < 1 || k > d - 1) {
        std::fprintf(stderr, "constants: need 1 <= k <= d-1 (k = d carries no limit constant)\n");
        return 2;
    }
    ConstantEstimate est = estimate_Dk(d, k, samples, substream(seed, 0));
    std::printf("D_k  d=%d k=%d : %.10f", d, k, est.value);
    if (est.exact)
        std::printf("  (exact)\n");
    else
        std::printf("  +- %.2g  (%llu samples)\n", est.std_error,
                    static_cast<unsigned long long>(est.samples));
    return 0;
}

// ---------------------------------------------------------------------------
// selftest: brute-force oracle suites
// ---------------------------------------------------------------------------

int failures = 0;

void check(bool ok, const char* what) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what);
    if (!ok) ++failures;
}

PointCloud random_cloud(int d, double mean_points, std::uint64_t seed, std::uint64_t idx) {
    return sample_poisson(mean_points, d, seed, idx);
}

void selftest_metric() {
    RandomStream rng = substream(999, 1);
    bool sym = true, tri = true, lift_iso = true;
    for (int it = 0; it < 2000; ++it) {
        int d = 2 + static_cast<int>(rng.next_u64() % 3);
        std::vector<double> x(d), y(d), z(d);
        for (int a = 0; a < d; ++a) {
            x[a] = rng.next_double();
            y[a] = rng.next_double();
            z[a] = rng.next_double();
        }
        double dxy = torus_dist(x.data(), y.data(), d);
        double dyx = torus_dist(y.data(), x.data(), d);
        double dxz = torus_dist(x.data(), z.data(), d);
        double dzy = torus_dist(z.data(), y.data(), d);
        if (dxy != dyx) sym = false;
        if (dxy > dxz + dzy + 1e-12) tri = false;
    }
    for (int it = 0; it < 500; ++it) {
        int d = 2;
        TorusPoint anchor(std::vector<double>{rng.next_double(), rng.next_double()});
        std::vector<TorusPoint> pts;
        for (int i = 0; i < 4; ++i) {
            std::vector<double> c(d);
            for (int a = 0; a < d; ++a)
                c[a] = canonical_coord(anchor[a] + 0.2 * (rng.next_double() - 0.5));
            pts.emplace_back(c);
        }
        auto lifted = lift(pts, anchor);
        for (std::size_t i = 0; i < pts.size() && lift_iso; ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                double de = 0.0;
                for (int a = 0; a < d; ++a)
                    de += (lifted[i][a] - lifted[j][a]) * (lifted[i][a] - lifted[j][a]);
                if (std::fabs(std::sqrt(de) - torus_dist(pts[i], pts[j])) > 1e-12) {
                    lift_iso = false;
                    break;
                }
            }
    }
    check(sym, "torus metric symmetry");
    check(tri, "torus metric triangle inequality");
    check(lift_iso, "lift isometry");
}

void selftest_detector() {
    bool equal = true;
    int combos = 0;
    for (int d = 2; d <= 3 && equal; ++d)
        for (int k = 1; k <= 2 && equal; ++k)
            for (int rep = 0; rep < 12; ++rep) {
                PointCloud P = random_cloud(d, 40, 4242, combos * 100 + rep);
                if (P.size() > 60) continue;
                auto fast = detect_critical_faces(P, k, 0.0, 0.12);
                auto brute = detect_critical_faces_brute(P, k, 0.0, 0.12);
                if (fast.size() != brute.size()) {
                    equal = false;
                    break;
                }
                for (std::size_t i = 0; i < fast.size(); ++i)
                    if (fast[i].vertex_ids != brute[i].vertex_ids ||
                        fast[i].value != brute[i].value) {
                        equal = false;
                        break;
                    }
                ++combos;
            }
    check(equal, "grid detector equals brute-force enumerator");
}

void selftest_persistence() {
    bool reductions = true, mst_ok = true, beta0_ok = true;
    for (int rep = 0; rep < 20; ++rep) {
        PointCloud P = random_cloud(2, 35, 777, rep);
        Filtration f = build_cech_filtration(P, 0.11, 2);
        PersistencePairing fast = reduce_boundary_matrix(f);
        PersistencePairing naive = reduce_boundary_matrix_naive(f);
        for (int p = 0; p <= f.max_dimension && reductions; ++p)
            for (std::size_t i = 0; i < f.count(p); ++i)
                if (fast.destroyer[p][i] != naive.destroyer[p][i] ||
                    fast.partner[p][i] != naive.partner[p][i]) {
                    reductions = false;
                    break;
                }
        auto mst = mst_negative_one_faces(P, 0.11);
        std::size_t destroyers = 0;
        for (std::size_t e = 0; e < f.count(1); ++e)
            if (fast.destroyer[1][e]) ++destroyers;
        if (destroyers != mst.size()) mst_ok = false;
        for (double r : {0.03, 0.07, 0.11})
            if (betti_profile(fast, r)[0] != component_count(P, r)) beta0_ok = false;
    }
    check(reductions, "fast reduction equals naive left-to-right reduction");
    check(mst_ok, "destroyer edges equal MST edges");
    check(beta0_ok, "beta_0 profile equals union-find components");
}

void selftest_sampling() {
    RandomStream s = substream(55, 3);
    const int reps = 4000;
    double mean = 0.0, var = 0.0;
    std::vector<double> xs(reps);
    for (int i = 0; i < reps; ++i) xs[i] = static_cast<double>(s.next_poisson(100.0));
    for (double x : xs) mean += x;
    mean /= reps;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= reps - 1;
    check(std::fabs(mean - 100.0) < 5.0 * std::sqrt(100.0 / reps), "Poisson sample mean");
    check(std::fabs(var - 100.0) < 0.15 * 100.0, "Poisson sample variance");
}

int cmd_selftest() {
    selftest_metric();
    selftest_sampling();
    selftest_detector();
    selftest_persistence();
    std::printf("%s\n", failures == 0 ? "selftest: all suites passed" : "selftest: FAILURES");
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"critical faces of the toroidal distance function: simulation and verification"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::int64_t trials = 0;
    bool trials_set = false;
    std::vector<double> n_list;

    auto* run = app.add_subcommand("run", "run one experiment configuration");
    run->add_option("--config", config_path, "flat JSON config")->required();
    run->add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_option("--trials", trials, "trial count override")->each([&](const std::string&) {
        trials_set = true;
    });
    run->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "convergence sweep over a list of n");
    sweep->add_option("--config", config_path, "flat JSON config")->required();
    sweep->add_option("--n-list", n_list, "comma separated intensities")->delimiter(',');
    sweep->add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    sweep->add_option("--trials", trials, "trial count override")->each([&](const std::string&) {
        trials_set = true;
    });
    sweep->add_option("--out", out_dir, "output directory");

    int cd = 2, ck = 1;
    std::uint64_t csamples = 1000000, cseed = 0;
    auto* constants = app.add_subcommand("constants", "limit constant D_k for a (d,k) pair");
    constants->add_option("--d", cd, "ambient dimension")->required();
    constants->add_option("--k", ck, "face index")->required();
    constants->add_option("--samples", csamples, "Monte Carlo samples (k >= 2)");
    constants->add_option("--seed", cseed, "Monte Carlo seed");

    auto* selftest = app.add_subcommand("selftest", "run the brute-force oracle suites");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, seed_set ? &seed : nullptr,
                           trials_set ? &trials : nullptr, out_dir);
        if (sweep->parsed())
            return cmd_sweep(config_path, n_list, seed_set ? &seed : nullptr,
                             trials_set ? &trials : nullptr, out_dir);
        if (constants->parsed()) return cmd_constants(cd, ck, csamples, cseed);
        if (selftest->parsed()) return cmd_selftest();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
