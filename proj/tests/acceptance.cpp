// Acceptance suite: each criterion runs standalone (argv[1] = 1..9), prints
// one PASS/FAIL line, and exits nonzero on failure. The convergence sweep is
// cached on disk so the two criteria that consume it share one computation
// (results are deterministic, so reuse is exact).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "critfaces/engine.hpp"
#include "critfaces/io.hpp"
#include "critfaces/persistence.hpp"
#include "support.hpp"

using namespace critfaces;

namespace {

constexpr std::uint64_t kSeedMecke = 20250808;
constexpr std::uint64_t kSeedSweep = 424242;
constexpr std::uint64_t kSeedMst = 1404;
constexpr std::uint64_t kSeedBrute = 660;

int g_failures = 0;

void report(bool ok, int criterion, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    if (!ok) ++g_failures;
}

ExperimentConfig mecke_config() {
    ExperimentConfig cfg;
    cfg.d = 2;
    cfg.k = 1;
    cfg.n_list = {1000};
    cfg.schedule = ScheduleRule::custom(1.0, 1.0); // a_n = log n + log log n
    cfg.rn_rule.kind = RnRuleKind::power;
    cfg.u0 = 0.0;
    cfg.trials = 2000;
    cfg.master_seed = kSeedMecke;
    cfg.classify_signs = true;
    cfg.verify_full = true; // per-trial Morse-Betti identities on every trial
    cfg.eta_bin_edges = {0.0, 0.5, 1.0, 2.0};
    return cfg;
}

ExperimentConfig sweep_config() {
    ExperimentConfig cfg;
    cfg.d = 2;
    cfg.k = 1;
    cfg.n_list = {512, 2048, 8192};
    cfg.schedule = ScheduleRule::custom(1.0, 1.0);
    cfg.rn_rule.kind = RnRuleKind::power;
    cfg.u0 = 0.0;
    cfg.trials = 4000;
    cfg.master_seed = kSeedSweep;
    cfg.classify_signs = true;
    cfg.verify_full = false;
    return cfg;
}

// ---------------------------------------------------------------------------
// sweep cache
// ---------------------------------------------------------------------------

std::string cache_path() {
    if (const char* env = std::getenv("CRITFACES_ACCEPT_CACHE")) return env;
    return "acceptance_sweep_cache.json";
}

void save_sweep(const SweepReport& r) {
    nlohmann::json j;
    j["target"] = r.target;
    j["target_se"] = r.target_se;
    for (const auto& c : r.cells) {
        nlohmann::json cell;
        cell["n"] = c.n;
        cell["a_n"] = c.a_n;
        cell["R_n"] = c.R_n;
        cell["b"] = c.b;
        cell["trials"] = c.trials;
        cell["mean_G"] = c.mean_G;
        cell["mecke_G"] = c.mecke_G;
        cell["p1"] = c.pG1.p_hat;
        cell["se1"] = c.pG1.std_error;
        cell["ppos"] = c.pGpos1.p_hat;
        cell["sepos"] = c.pGpos1.std_error;
        cell["pneg"] = c.pGneg1.p_hat;
        cell["seneg"] = c.pGneg1.std_error;
        cell["p2"] = c.pG2.p_hat;
        cell["se2"] = c.pG2.std_error;
        cell["disc"] = c.discrepancy_rate;
        j["cells"].push_back(cell);
    }
    std::ofstream out(cache_path());
    out << j.dump(2) << "\n";
}

bool load_sweep(SweepReport& r) {
    std::ifstream in(cache_path());
    if (!in.good()) return false;
    nlohmann::json j;
    try {
        in >> j;
        r = SweepReport{};
        r.target = j.at("target").get<double>();
        r.target_se = j.at("target_se").get<double>();
        for (const auto& cell : j.at("cells")) {
            SweepCell c;
            c.n = cell.at("n").get<double>();
            c.a_n = cell.at("a_n").get<double>();
            c.R_n = cell.at("R_n").get<double>();
            c.b = cell.at("b").get<double>();
            c.trials = cell.at("trials").get<std::int64_t>();
            c.mean_G = cell.at("mean_G").get<double>();
            c.mecke_G = cell.at("mecke_G").get<double>();
            c.pG1 = {cell.at("p1").get<double>(), cell.at("se1").get<double>(), 0};
            c.pGpos1 = {cell.at("ppos").get<double>(), cell.at("sepos").get<double>(), 0};
            c.pGneg1 = {cell.at("pneg").get<double>(), cell.at("seneg").get<double>(), 0};
            c.pG2 = {cell.at("p2").get<double>(), cell.at("se2").get<double>(), 0};
            c.discrepancy_rate = cell.at("disc").get<double>();
            r.cells.push_back(c);
        }
    } catch (const std::exception&) {
        return false;
    }
    evaluate_sweep_flags(r);
    return r.cells.size() == 3;
}

SweepReport sweep_results() {
    SweepReport r;
    if (load_sweep(r)) {
        std::printf("  (sweep loaded from %s)\n", cache_path().c_str());
        return r;
    }
    std::printf("  (running the sweep: 3 cells x 4000 trials; this takes a while)\n");
    r = convergence_sweep(sweep_config());
    save_sweep(r);
    return r;
}

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

int criterion_1() {
    ExperimentConfig cfg = mecke_config();
    DerivedParams p = derive_params(cfg, 1000.0);
    // closed-form oracle, computed before the simulation: D_1 = 2 exactly,
    // E[G] = D_1 b (e^{-u0} - e^{-u_max})
    const double oracle = 2.0 * p.b * (std::exp(-cfg.u0) - std::exp(-p.u_max));
    std::printf("  closed-form Mecke mean = %.7f (b=%.6f, u_max=%.4f)\n", oracle, p.b, p.u_max);

    ExperimentResult res = run_experiment(cfg);
    double z = (res.stats.G.mean - oracle) / res.stats.G.std_error;
    std::ostringstream os;
    os << "exact Mecke mean: empirical " << res.stats.G.mean << " vs " << oracle << " (z = "
       << z << ", 2000 trials)";
    bool ok = std::fabs(z) <= 3.0 && std::fabs(oracle - 0.2895) < 0.001;
    report(ok, 1, os.str());
    return ok ? 0 : 1;
}

int criterion_2() {
    ExperimentConfig cfg = mecke_config();
    DerivedParams p = derive_params(cfg, 1000.0);
    ExperimentResult res = run_experiment(cfg);

    bool all_ok = true;
    const double edges[5] = {0.0, 0.5, 1.0, 2.0, p.u_max};
    for (int i = 0; i < 4; ++i) {
        // independent closed-form oracle for the bin mass
        double target = 2.0 * p.b * (std::exp(-edges[i]) - std::exp(-edges[i + 1]));
        const BinStat& bin = res.stats.eta_bins[i];
        double z = bin.std_error > 0 ? (bin.mean_count - target) / bin.std_error
                                     : (bin.mean_count == target ? 0.0 : 1e9);
        std::printf("  bin [%g, %s): empirical %.5f vs %.5f (z = %+.2f)\n", edges[i],
                    i == 3 ? "inf" : std::to_string(edges[i + 1]).c_str(), bin.mean_count,
                    target, z);
        if (std::fabs(z) > 3.0) all_ok = false;
        // the engine's quadrature agrees with the closed form
        double engine_bin = mecke_expected_bin(cfg, p, 2.0, edges[i],
                                               i == 3 ? p.u_max + 1.0 : edges[i + 1]);
        if (std::fabs(engine_bin - target) > 1e-9) all_ok = false;
    }
    report(all_ok, 2, "per-bin eta intensities match the Mecke density at 3 sigma");
    return all_ok ? 0 : 1;
}

int criterion_3() {
    bool ok = true;
    for (int d = 2; d <= 4; ++d) {
        ConstantEstimate est = estimate_Dk(d, 1, 1, substream(1, 0));
        double expect = std::ldexp(1.0, d - 1);
        std::printf("  D_1(d=%d) = %.1f (exact path), expected %.1f\n", d, est.value, expect);
        if (!(est.exact && est.value == expect && est.std_error == 0.0)) ok = false;
    }
    double quad = testsupport::quadrature_D2_d3(512);
    ConstantEstimate mc1 = estimate_Dk(3, 2, 10000000, substream(2, 0));
    ConstantEstimate mc2 = estimate_Dk(3, 2, 10000000, substream(3, 0));
    double combined = std::sqrt(mc1.std_error * mc1.std_error + mc2.std_error * mc2.std_error);
    std::printf("  D_2(d=3): quadrature %.6f, MC %.6f +- %.6f and %.6f +- %.6f\n", quad,
                mc1.value, mc1.std_error, mc2.value, mc2.std_error);
    if (std::fabs(mc1.value - quad) > 3.0 * mc1.std_error) ok = false;
    if (std::fabs(mc2.value - quad) > 3.0 * mc2.std_error) ok = false;
    if (std::fabs(mc1.value - mc2.value) > 3.0 * combined) ok = false;
    report(ok, 3, "D_1 = 2^{d-1} exactly for d in {2,3,4}; d=3,k=2 Monte Carlo matches "
                  "the product quadrature within 3 sigma");
    return ok ? 0 : 1;
}

// shared by criteria 4 and 5: the sparse MST configuration
bool mst_trial_checks(bool with_betti, int* checked_trials) {
    const double R = 0.1;
    int trials_run = 0;
    for (int t = 0; t < 200; ++t) {
        PointCloud P = sample_poisson(100.0, 2, kSeedMst, t);
        if (P.size() < 2) continue;
        Filtration filt = build_cech_filtration(P, R, 2);
        PersistencePairing pairing = reduce_boundary_matrix(filt);
        auto faces1 = classify_faces(detect_critical_faces(P, 1, 0.0, R), pairing);
        auto mst = mst_negative_one_faces(P, R);

        std::vector<const CriticalFace*> negs;
        for (const auto& f : faces1)
            if (f.sign == FaceSign::negative) negs.push_back(&f);
        if (negs.size() != mst.size()) return false;
        for (std::size_t i = 0; i < negs.size(); ++i) {
            if (negs[i]->vertex_ids != mst[i].vertex_ids) return false;
            if (negs[i]->value != mst[i].value) return false;
            if (negs[i]->center.coords != mst[i].center.coords) return false;
        }
        if (with_betti) {
            auto faces2 = classify_faces(detect_critical_faces(P, 2, 0.0, R), pairing);
            for (double r : {0.25 * R, 0.5 * R, R}) {
                auto beta = betti_profile(pairing, r);
                std::int64_t neg1 = 0, pos1 = 0, neg2 = 0;
                for (const auto& f : faces1) {
                    if (f.value > r) continue;
                    (f.sign == FaceSign::negative ? neg1 : pos1)++;
                }
                for (const auto& f : faces2)
                    if (f.sign == FaceSign::negative && f.value <= r) ++neg2;
                if (beta[0] != component_count(P, r)) return false;
                if (beta[0] != P.size() - neg1) return false;
                if (beta[1] != pos1 - neg2) return false;
            }
        }
        ++trials_run;
    }
    if (checked_trials) *checked_trials = trials_run;
    return true;
}

int criterion_4() {
    int trials_run = 0;
    bool ok = mst_trial_checks(false, &trials_run);
    std::ostringstream os;
    os << "negative critical 1-faces equal the torus MST edge set exactly in " << trials_run
       << " trials (d=2, n=100, R=0.1)";
    report(ok && trials_run >= 195, 4, os.str());
    return ok ? 0 : 1;
}

int criterion_5() {
    // (a) the exact Mecke run re-executes with per-trial verification of the
    // Morse-Betti identities (any violation throws inside run_trial);
    // explicit spot checks below re-derive the identities in test code.
    ExperimentConfig cfg = mecke_config();
    bool engine_ok = true;
    std::string what;
    try {
        (void)run_experiment(cfg);
    } catch (const std::exception& e) {
        engine_ok = false;
        what = e.what();
    }
    if (!engine_ok) {
        report(false, 5, "per-trial verification failed: " + what);
        return 1;
    }

    // explicit re-derivation on 100 trials of the same seeds
    DerivedParams p = derive_params(cfg, 1000.0);
    bool explicit_ok = true;
    for (int t = 0; t < 100 && explicit_ok; ++t) {
        PointCloud P = sample_poisson(1000.0, 2, kSeedMecke, t);
        if (P.size() < 2) continue;
        Filtration filt = build_cech_filtration(P, p.R_n, 2);
        PersistencePairing pairing = reduce_boundary_matrix(filt);
        auto faces1 = classify_faces(detect_critical_faces(P, 1, 0.0, p.R_n), pairing);
        auto faces2 = classify_faces(detect_critical_faces(P, 2, 0.0, p.R_n), pairing);
        for (double r : {p.r_u0, 0.5 * p.R_n, p.R_n}) {
            auto beta = betti_profile(pairing, r);
            std::int64_t neg1 = 0, pos1 = 0, neg2 = 0;
            for (const auto& f : faces1) {
                if (f.value > r) continue;
                (f.sign == FaceSign::negative ? neg1 : pos1)++;
            }
            for (const auto& f : faces2)
                if (f.sign == FaceSign::negative && f.value <= r) ++neg2;
            if (beta[0] != component_count(P, r)) explicit_ok = false;
            if (beta[0] != P.size() - neg1) explicit_ok = false;
            if (beta[1] != pos1 - neg2) explicit_ok = false;
        }
    }

    // (b) the MST configuration with the Betti identities
    bool mst_ok = mst_trial_checks(true, nullptr);

    bool ok = engine_ok && explicit_ok && mst_ok;
    report(ok, 5, "Morse-Betti conservation exact on every verified trial "
                  "(beta_0 vs union-find at three radii; beta_1 vs signed face counts)");
    return ok ? 0 : 1;
}

int criterion_6() {
    int checked = 0;
    bool ok = true;
    for (int d = 2; d <= 3 && ok; ++d)
        for (int k = 1; k <= 2 && ok; ++k) {
            int done = 0;
            for (std::uint64_t idx = 0; done < 125 && ok; ++idx) {
                PointCloud P = sample_poisson(42.0, d, kSeedBrute + d * 10 + k, idx);
                if (P.size() > 60 || P.size() < k + 1) continue;
                auto fast = detect_critical_faces(P, k, 0.0, 0.12);
                auto brute = detect_critical_faces_brute(P, k, 0.0, 0.12);
                if (fast.size() != brute.size()) {
                    ok = false;
                    break;
                }
                for (std::size_t i = 0; i < fast.size(); ++i)
                    if (fast[i].vertex_ids != brute[i].vertex_ids ||
                        fast[i].value != brute[i].value ||
                        fast[i].center.coords != brute[i].center.coords) {
                        ok = false;
                        break;
                    }
                ++done;
                ++checked;
            }
        }
    std::ostringstream os;
    os << "grid-accelerated detector equals the no-pruning enumerator on " << checked
       << " random clouds (d in {2,3}, k in {1,2})";
    report(ok && checked == 500, 6, os.str());
    return (ok && checked == 500) ? 0 : 1;
}

int criterion_7() {
    SweepReport r = sweep_results();
    const SweepCell& last = r.cells.back();
    double scaled = last.pG1.p_hat / last.b;
    double half = 3.0 * last.pG1.std_error / last.b + 0.15 * r.target;
    double p2_over_b = last.pG2.p_hat / last.b;
    for (const auto& c : r.cells)
        std::printf("  n=%6.0f: P(G>=1)/b = %.4f  P(G>=2)/b = %.4f  (b = %.5f)\n", c.n,
                    c.pG1.p_hat / c.b, c.pG2.p_hat / c.b, c.b);
    bool covers = std::fabs(scaled - r.target) <= half;
    bool single_atom = p2_over_b < 0.3;
    std::ostringstream os;
    os << "scaled P(G>=1) at n=8192 is " << scaled << " vs target " << r.target
       << " (band half-width " << half << "); P(G>=2)/b = " << p2_over_b << " < 0.3";
    report(covers && single_atom, 7, os.str());
    return (covers && single_atom) ? 0 : 1;
}

int criterion_8() {
    SweepReport r = sweep_results();
    const SweepCell& last = r.cells.back();
    double pos_scaled = last.pGpos1.p_hat / last.b;
    double neg_scaled = last.pGneg1.p_hat / last.b;
    double pos_half = 3.0 * last.pGpos1.std_error / last.b + 0.15 * r.target;
    double neg_half = 3.0 * last.pGneg1.std_error / last.b + 0.15 * r.target;
    bool pos_ok = std::fabs(pos_scaled - r.target) <= pos_half;
    bool neg_ok = std::fabs(neg_scaled - r.target) <= neg_half;
    bool trend = r.cells.back().discrepancy_rate < r.cells.front().discrepancy_rate;

    for (const auto& c : r.cells)
        std::printf("  n=%6.0f: P(G+>=1)/b = %.4f  P(G-_(k+1)>=1)/b = %.4f  "
                    "P(G+ != G-) = %.4f\n",
                    c.n, c.pGpos1.p_hat / c.b, c.pGneg1.p_hat / c.b, c.discrepancy_rate);
    std::printf("  positive band: |%.4f - %.4f| <= %.4f -> %s\n", pos_scaled, r.target,
                pos_half, pos_ok ? "ok" : "FAIL");
    std::printf("  negative band: |%.4f - %.4f| <= %.4f -> %s\n", neg_scaled, r.target,
                neg_half, neg_ok ? "ok" : "FAIL");
    std::printf("  discrepancy trend down: %s\n", trend ? "ok" : "FAIL");

    bool ok = pos_ok && neg_ok && trend;
    std::ostringstream os;
    os << "positive/negative analogues at n=8192: G+ scaled " << pos_scaled
       << (pos_ok ? " (in band)" : " (out of band)") << ", G-_(k+1) scaled " << neg_scaled
       << (neg_ok ? " (in band)" : " (out of band)") << ", discrepancy trend "
       << (trend ? "down" : "not down");
    report(ok, 8, os.str());
    return ok ? 0 : 1;
}

int criterion_9() {
    ExperimentConfig cfg = mecke_config();
    namespace fs = std::filesystem;
    fs::path base = fs::temp_directory_path() / "critfaces_acceptance_det";
    fs::remove_all(base);

    auto run_with_workers = [&](int workers, const fs::path& dir) {
        ExperimentResult res = run_experiment(cfg, workers);
        RunManifest manifest;
        manifest.config = cfg;
        manifest.Dk = res.Dk;
        write_results(res, manifest, dir.string());
    };
    run_with_workers(1, base / "w1");
    run_with_workers(2, base / "w2");

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    bool summary_same = slurp(base / "w1" / "summary.json") == slurp(base / "w2" / "summary.json");
    bool atoms_same = slurp(base / "w1" / "atoms.csv") == slurp(base / "w2" / "atoms.csv");
    bool nonempty = !slurp(base / "w1" / "summary.json").empty();
    fs::remove_all(base);

    bool ok = summary_same && atoms_same && nonempty;
    report(ok, 9, "summary JSON and atoms CSV byte-identical across worker counts 1 and 2");
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <criterion 1..9>\n", argv[0]);
        return 2;
    }
    int crit = std::atoi(argv[1]);
    try {
        switch (crit) {
        case 1: return criterion_1();
        case 2: return criterion_2();
        case 3: return criterion_3();
        case 4: return criterion_4();
        case 5: return criterion_5();
        case 6: return criterion_6();
        case 7: return criterion_7();
        case 8: return criterion_8();
        case 9: return criterion_9();
        default:
            std::fprintf(stderr, "unknown criterion %d\n", crit);
            return 2;
        }
    } catch (const std::exception& e) {
        std::printf("[FAIL] criterion %d: exception: %s\n", crit, e.what());
        return 1;
    }
}
