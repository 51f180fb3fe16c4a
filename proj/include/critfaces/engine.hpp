#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "critfaces/constants.hpp"
#include "critfaces/detector.hpp"
#include "critfaces/sampling.hpp"

// Trial orchestration: sample, detect, classify, count, and compare the
// empirical statistics against the exact Mecke mean and the asymptotic
// scaled-probability targets.

namespace critfaces {

enum class RnRuleKind { power, fixed_multiple, custom };

struct RnRule {
    RnRuleKind kind = RnRuleKind::power;
    double multiple = 2.0; // fixed_multiple: R_n = multiple * r_n(0)
    double value = 0.0;    // custom: literal R_n
};

struct ExperimentConfig {
    int d = 2;
    int k = 1;
    std::vector<double> n_list; // one entry for plain runs, >= 3 for sweeps
    ScheduleRule schedule = ScheduleRule::threshold_logloglog();
    RnRule rn_rule;
    double u0 = 0.0;
    std::int64_t trials = 1;
    std::uint64_t master_seed = 0;
    bool classify_signs = true;
    bool classify_only = false; // permits k == d, excludes theory comparison
    std::vector<double> eta_bin_edges = {0.0, 0.5, 1.0, 2.0}; // last bin open-ended
    bool verify_full = false;   // per-trial Morse-Betti identity checks
    std::uint64_t dk_samples = 2000000;
};

struct DerivedParams {
    double n = 0.0;
    double a_n = 0.0;
    double r_u0 = 0.0;
    double R_n = 0.0;
    double u_max = 0.0; // n omega_d R_n^d - a_n
    double b = 0.0;     // b_{k,n}
};

// Evaluates a_n, r_n(u0), R_n and checks the window conditions
// (r_n(u0) < R_n, 4 R_n < 1/2, nonempty u-window). Throws with the failing
// condition in the message.
DerivedParams derive_params(const ExperimentConfig& cfg, double n);

// Full validation of an ExperimentConfig (ranges plus derive_params for
// every n in the list).
void validate_config(const ExperimentConfig& cfg);

struct EtaAtom {
    std::vector<double> center;
    double u = 0.0;
    int sign = 0; // +1 positive, -1 negative, 0 unclassified
};

struct TrialResult {
    std::int64_t trial_index = 0;
    std::int64_t points = 0;
    std::int64_t count_G = 0;
    std::int64_t count_G_pos = 0;
    std::int64_t count_G_neg_next = 0;
    std::vector<EtaAtom> atoms;       // critical k-faces with u >= u0
    std::vector<double> eta_minus_u;  // u of negative (k+1)-faces with u >= u0
};

TrialResult run_trial(const ExperimentConfig& cfg, const DerivedParams& p,
                      std::int64_t trial_index, std::uint64_t stream_base = 0);

struct ScalarStat {
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;
};

struct ProbStat {
    double p_hat = 0.0;
    double std_error = 0.0;
    std::int64_t successes = 0;
};

struct BinStat {
    double lo = 0.0;
    double hi = 0.0; // +inf for the last bin
    double mean_count = 0.0;
    double std_error = 0.0;
};

struct AggregateStats {
    std::int64_t trials = 0;
    ScalarStat G, G_pos, G_neg_next;
    ProbStat p_G_ge1, p_Gpos_ge1, p_Gneg_ge1, p_G_ge2;
    double discrepancy_rate = 0.0; // fraction of trials with G_pos != G_neg_next
    std::vector<BinStat> eta_bins;
    std::int64_t atom_total = 0;
    double chi2_stat = 0.0;
    int chi2_df = 0;
    double chi2_pvalue = 1.0;
};

AggregateStats aggregate(const std::vector<TrialResult>& results, const ExperimentConfig& cfg);

// Exact mean of G_{k,n} over the window [u0, u_max) via the Mecke identity;
// closed form for k = 1, adaptive quadrature otherwise.
double mecke_expected_count(const ExperimentConfig& cfg, const DerivedParams& p, double Dk);

// Same integral restricted to [u_lo, min(u_hi, u_max)).
double mecke_expected_bin(const ExperimentConfig& cfg, const DerivedParams& p, double Dk,
                          double u_lo, double u_hi);

struct TheoryRow {
    std::string name;
    double empirical = 0.0;
    double target = 0.0;
    double std_error = 0.0; // combined empirical + target uncertainty
    double z = 0.0;
    bool pass = false;      // |z| <= 3
    bool asymptotic = false; // finite-n bias expected; informational
    std::string note;
};

struct TheoryReport {
    std::vector<TheoryRow> rows;
    bool exact_rows_pass = false; // every non-asymptotic row within 3 sigma
};

TheoryReport compare_to_theory(const AggregateStats& stats, const ExperimentConfig& cfg,
                               const DerivedParams& p, const ConstantEstimate& Dk);

struct ExperimentResult {
    ExperimentConfig config;
    DerivedParams params;
    ConstantEstimate Dk;
    std::vector<TrialResult> trials;
    AggregateStats stats;
    TheoryReport report;
};

// Runs all trials (parallel across workers, deterministic aggregation) for
// the single-n configuration. workers = 0 means auto (env override, then
// hardware).
ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers = 0);

struct SweepCell {
    double n = 0.0;
    double a_n = 0.0, R_n = 0.0, b = 0.0;
    std::int64_t trials = 0;
    double mean_G = 0.0, mecke_G = 0.0;
    ProbStat pG1, pGpos1, pGneg1, pG2;
    double discrepancy_rate = 0.0;
};

struct SweepReport {
    std::vector<SweepCell> cells;
    double target = 0.0;      // D_k e^{-u0}
    double target_se = 0.0;
    double allowance = 0.15;  // finite-size band widening, fraction of target
    bool final_covers_target = false;     // scaled P(G>=1) at largest n
    bool final_pos_covers = false;        // scaled P(G+>=1)
    bool final_neg_covers = false;        // scaled P(G-_{k+1}>=1)
    double final_pG2_over_b = 0.0;
    bool discrepancy_trend_down = false;  // strictly lower at largest n
};

// Coverage and trend flags from cell data; separated so synthetic cells can
// exercise the gate logic.
void evaluate_sweep_flags(SweepReport& report);

SweepReport convergence_sweep(const ExperimentConfig& cfg, int workers = 0);

// Worker resolution: explicit > CRITFACES_WORKERS > hardware concurrency.
int resolve_workers(int requested);

} // namespace critfaces
