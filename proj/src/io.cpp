#include "critfaces/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace critfaces {

namespace {

// ---------------------------------------------------------------------------
// deterministic JSON/CSV formatting: 17 significant digits, fixed key order
// ---------------------------------------------------------------------------

std::string fmt_double(double x) {
    if (std::isnan(x)) return "\"nan\"";
    if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string csv_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

struct JsonWriter {
    std::ostringstream os;
    bool need_comma = false;

    void raw(const std::string& s) { os << s; }
    void sep() {
        if (need_comma) os << ",";
        need_comma = false;
    }
    void open_obj(const std::string& key = "") {
        sep();
        if (!key.empty()) os << json_escape(key) << ":";
        os << "{";
    }
    void close_obj() {
        os << "}";
        need_comma = true;
    }
    void open_arr(const std::string& key = "") {
        sep();
        if (!key.empty()) os << json_escape(key) << ":";
        os << "[";
    }
    void close_arr() {
        os << "]";
        need_comma = true;
    }
    void field(const std::string& key, const std::string& raw_value) {
        sep();
        os << json_escape(key) << ":" << raw_value;
        need_comma = true;
    }
    void num(const std::string& key, double v) { field(key, fmt_double(v)); }
    void integer(const std::string& key, long long v) { field(key, std::to_string(v)); }
    void uinteger(const std::string& key, unsigned long long v) {
        field(key, std::to_string(v));
    }
    void boolean(const std::string& key, bool v) { field(key, v ? "true" : "false"); }
    void str(const std::string& key, const std::string& v) { field(key, json_escape(v)); }
};

const char* schedule_name(ScheduleKind k) {
    switch (k) {
    case ScheduleKind::threshold_plus_logloglog: return "threshold_plus_logloglog";
    case ScheduleKind::two_log_n: return "two_log_n";
    case ScheduleKind::custom: return "custom";
    }
    return "?";
}

const char* rn_rule_name(RnRuleKind k) {
    switch (k) {
    case RnRuleKind::power: return "power";
    case RnRuleKind::fixed_multiple: return "fixed_multiple";
    case RnRuleKind::custom: return "custom";
    }
    return "?";
}

void write_config_fields(JsonWriter& w, const ExperimentConfig& cfg) {
    w.integer("d", cfg.d);
    w.integer("k", cfg.k);
    if (cfg.n_list.size() == 1) {
        w.num("n", cfg.n_list[0]);
    } else {
        w.open_arr("n_list");
        for (double n : cfg.n_list) {
            w.sep();
            w.raw(fmt_double(n));
            w.need_comma = true;
        }
        w.close_arr();
    }
    w.str("schedule", schedule_name(cfg.schedule.kind));
    if (cfg.schedule.kind == ScheduleKind::custom) {
        w.num("c_log", cfg.schedule.c_log);
        w.num("c_loglog", cfg.schedule.c_loglog);
        w.num("c_const", cfg.schedule.c_const);
        w.num("c_logloglog", cfg.schedule.c_logloglog);
    }
    w.str("rn_rule", rn_rule_name(cfg.rn_rule.kind));
    if (cfg.rn_rule.kind == RnRuleKind::fixed_multiple) w.num("rn_multiple", cfg.rn_rule.multiple);
    if (cfg.rn_rule.kind == RnRuleKind::custom) w.num("rn_value", cfg.rn_rule.value);
    w.num("u0", cfg.u0);
    w.integer("trials", cfg.trials);
    w.uinteger("seed", cfg.master_seed);
    w.boolean("classify_signs", cfg.classify_signs);
    w.boolean("classify_only", cfg.classify_only);
    w.open_arr("eta_bins");
    for (double e : cfg.eta_bin_edges) {
        w.sep();
        w.raw(fmt_double(e));
        w.need_comma = true;
    }
    w.close_arr();
    w.boolean("verify_full", cfg.verify_full);
    w.uinteger("dk_samples", cfg.dk_samples);
}

void write_manifest_fields(JsonWriter& w, const RunManifest& m) {
    w.open_obj("manifest");
    w.str("version", m.version);
    w.uinteger("master_seed", m.config.master_seed);
    w.open_obj("dk");
    w.num("value", m.Dk.value);
    w.num("std_error", m.Dk.std_error);
    w.uinteger("samples", m.Dk.samples);
    w.boolean("exact", m.Dk.exact);
    w.close_obj();
    w.close_obj();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_report_rows(JsonWriter& w, const TheoryReport& report) {
    w.open_arr("report");
    for (const auto& row : report.rows) {
        w.open_obj();
        w.str("name", row.name);
        w.num("empirical", row.empirical);
        w.num("target", row.target);
        w.num("std_error", row.std_error);
        w.num("z", row.z);
        w.boolean("pass", row.pass);
        w.boolean("asymptotic", row.asymptotic);
        w.str("note", row.note);
        w.close_obj();
    }
    w.close_arr();
    w.boolean("exact_rows_pass", report.exact_rows_pass);
}

constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Plot the data files emitted next to this script.

Consumes (when present):
  sweep_scaled_p.dat : n  estimate  lo  hi  target
  eta_bins.dat       : bin_lo  bin_hi  empirical  se  expected
Writes PNGs into the same directory.
"""
import os
import sys

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is required to plot")

here = os.path.dirname(os.path.abspath(__file__))

sweep = os.path.join(here, "sweep_scaled_p.dat")
if os.path.exists(sweep):
    rows = [list(map(float, ln.split())) for ln in open(sweep) if not ln.startswith("#")]
    if rows:
        n = [r[0] for r in rows]
        est = [r[1] for r in rows]
        lo = [r[2] for r in rows]
        hi = [r[3] for r in rows]
        target = rows[0][4]
        fig, ax = plt.subplots()
        ax.errorbar(n, est, yerr=[[e - l for e, l in zip(est, lo)],
                                  [h - e for e, h in zip(est, hi)]], fmt="o-")
        ax.axhline(target, linestyle="--")
        ax.set_xscale("log")
        ax.set_xlabel("n")
        ax.set_ylabel("P(G >= 1) / b")
        fig.savefig(os.path.join(here, "sweep_scaled_p.png"), dpi=150)

bins = os.path.join(here, "eta_bins.dat")
if os.path.exists(bins):
    rows = [list(map(float, ln.split())) for ln in open(bins) if not ln.startswith("#")]
    if rows:
        centers = [0.5 * (r[0] + min(r[1], r[0] + 2.0)) for r in rows]
        width = [min(r[1], r[0] + 2.0) - r[0] for r in rows]
        fig, ax = plt.subplots()
        ax.bar(centers, [r[2] for r in rows], width=width, alpha=0.5, label="empirical")
        ax.errorbar(centers, [r[2] for r in rows], yerr=[3 * r[3] for r in rows], fmt="none")
        ax.step(centers, [r[4] for r in rows], where="mid", label="expected")
        ax.set_xlabel("u")
        ax.set_ylabel("mean atoms per trial")
        ax.legend()
        fig.savefig(os.path.join(here, "eta_bins.png"), dpi=150)
)PY";

} // namespace

// ---------------------------------------------------------------------------
// config parsing
// ---------------------------------------------------------------------------

ExperimentConfig parse_config_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

    static const char* known[] = {"d",        "k",          "n",           "n_list",
                                  "schedule", "c_log",      "c_loglog",    "c_const",
                                  "c_logloglog", "rn_rule", "rn_multiple", "rn_value",
                                  "u0",       "trials",     "seed",        "classify_signs",
                                  "classify_only", "eta_bins", "verify_full", "dk_samples"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok) throw std::invalid_argument("config: unknown key '" + it.key() + "'");
    }

    ExperimentConfig cfg;
    if (j.contains("d")) cfg.d = j["d"].get<int>();
    if (j.contains("k")) cfg.k = j["k"].get<int>();
    if (j.contains("n") && j.contains("n_list"))
        throw std::invalid_argument("config: give either n or n_list");
    if (j.contains("n")) cfg.n_list = {j["n"].get<double>()};
    if (j.contains("n_list")) cfg.n_list = j["n_list"].get<std::vector<double>>();
    if (j.contains("schedule")) {
        std::string s = j["schedule"].get<std::string>();
        if (s == "threshold_plus_logloglog")
            cfg.schedule = ScheduleRule::threshold_logloglog();
        else if (s == "two_log_n")
            cfg.schedule = ScheduleRule::two_log();
        else if (s == "custom")
            cfg.schedule.kind = ScheduleKind::custom;
        else
            throw std::invalid_argument("config: unknown schedule '" + s + "'");
    }
    if (j.contains("c_log")) cfg.schedule.c_log = j["c_log"].get<double>();
    if (j.contains("c_loglog")) cfg.schedule.c_loglog = j["c_loglog"].get<double>();
    if (j.contains("c_const")) cfg.schedule.c_const = j["c_const"].get<double>();
    if (j.contains("c_logloglog")) cfg.schedule.c_logloglog = j["c_logloglog"].get<double>();
    if (j.contains("rn_rule")) {
        std::string s = j["rn_rule"].get<std::string>();
        if (s == "power")
            cfg.rn_rule.kind = RnRuleKind::power;
        else if (s == "fixed_multiple")
            cfg.rn_rule.kind = RnRuleKind::fixed_multiple;
        else if (s == "custom")
            cfg.rn_rule.kind = RnRuleKind::custom;
        else
            throw std::invalid_argument("config: unknown rn_rule '" + s + "'");
    }
    if (j.contains("rn_multiple")) cfg.rn_rule.multiple = j["rn_multiple"].get<double>();
    if (j.contains("rn_value")) cfg.rn_rule.value = j["rn_value"].get<double>();
    if (j.contains("u0")) cfg.u0 = j["u0"].get<double>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::int64_t>();
    if (j.contains("seed")) cfg.master_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("classify_signs")) cfg.classify_signs = j["classify_signs"].get<bool>();
    if (j.contains("classify_only")) cfg.classify_only = j["classify_only"].get<bool>();
    if (j.contains("eta_bins")) cfg.eta_bin_edges = j["eta_bins"].get<std::vector<double>>();
    if (j.contains("verify_full")) cfg.verify_full = j["verify_full"].get<bool>();
    if (j.contains("dk_samples")) cfg.dk_samples = j["dk_samples"].get<std::uint64_t>();

    validate_config(cfg);
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    JsonWriter w;
    w.open_obj();
    write_config_fields(w, cfg);
    w.close_obj();
    return w.os.str();
}

// ---------------------------------------------------------------------------
// results
// ---------------------------------------------------------------------------

void write_results(const ExperimentResult& result, const RunManifest& manifest,
                   const std::string& out_dir) {
    if (result.trials.empty())
        throw std::invalid_argument("write_results: refusing to write zero-trial results");
    std::filesystem::create_directories(out_dir);

    JsonWriter w;
    w.open_obj();
    w.str("version", manifest.version);
    w.open_obj("config");
    write_config_fields(w, result.config);
    w.close_obj();
    w.open_obj("params");
    w.num("a_n", result.params.a_n);
    w.num("r_u0", result.params.r_u0);
    w.num("R_n", result.params.R_n);
    w.num("u_max", result.params.u_max);
    w.num("b_kn", result.params.b);
    w.close_obj();
    write_manifest_fields(w, manifest);

    const AggregateStats& s = result.stats;
    w.open_obj("stats");
    w.integer("trials", s.trials);
    auto scalar = [&](const char* name, const ScalarStat& st) {
        w.open_obj(name);
        w.num("mean", st.mean);
        w.num("variance", st.variance);
        w.num("std_error", st.std_error);
        w.close_obj();
    };
    scalar("G", s.G);
    scalar("G_pos", s.G_pos);
    scalar("G_neg_next", s.G_neg_next);
    auto prob = [&](const char* name, const ProbStat& ps) {
        w.open_obj(name);
        w.num("p_hat", ps.p_hat);
        w.num("std_error", ps.std_error);
        w.integer("successes", ps.successes);
        w.close_obj();
    };
    prob("p_G_ge1", s.p_G_ge1);
    prob("p_Gpos_ge1", s.p_Gpos_ge1);
    prob("p_Gneg_ge1", s.p_Gneg_ge1);
    prob("p_G_ge2", s.p_G_ge2);
    w.num("discrepancy_rate", s.discrepancy_rate);
    w.open_arr("eta_bins");
    for (const auto& bin : s.eta_bins) {
        w.open_obj();
        w.num("lo", bin.lo);
        w.num("hi", bin.hi);
        w.num("mean_count", bin.mean_count);
        w.num("std_error", bin.std_error);
        w.close_obj();
    }
    w.close_arr();
    w.integer("atom_total", s.atom_total);
    w.num("chi2_stat", s.chi2_stat);
    w.integer("chi2_df", s.chi2_df);
    w.num("chi2_pvalue", s.chi2_pvalue);
    w.close_obj();

    write_report_rows(w, result.report);
    w.close_obj();
    write_file(out_dir + "/summary.json", w.os.str() + "\n");

    // atoms CSV: one row per eta atom
    std::ostringstream csv;
    csv << "# atoms-v1: trial";
    for (int a = 0; a < result.config.d; ++a) csv << ",center_" << a;
    csv << ",u,sign,index\n";
    for (const auto& tr : result.trials)
        for (const auto& atom : tr.atoms) {
            csv << tr.trial_index;
            for (int a = 0; a < result.config.d; ++a) csv << "," << csv_double(atom.center[a]);
            csv << "," << csv_double(atom.u) << "," << atom.sign << "," << result.config.k
                << "\n";
        }
    write_file(out_dir + "/atoms.csv", csv.str());
}

void write_sweep(const SweepReport& report, const ExperimentConfig& cfg,
                 const RunManifest& manifest, const std::string& out_dir) {
    if (report.cells.empty())
        throw std::invalid_argument("write_sweep: refusing to write an empty sweep");
    std::filesystem::create_directories(out_dir);

    std::ostringstream csv;
    csv << "# sweep-v1: n,a_n,R_n,b_kn,trials,mean_G,mecke_G,p_G_ge1,se_G_ge1,p_Gpos_ge1,"
           "p_Gneg_ge1,p_G_ge2,discrepancy_rate,target\n";
    for (const auto& c : report.cells) {
        csv << csv_double(c.n) << "," << csv_double(c.a_n) << "," << csv_double(c.R_n) << ","
            << csv_double(c.b) << "," << c.trials << "," << csv_double(c.mean_G) << ","
            << csv_double(c.mecke_G) << "," << csv_double(c.pG1.p_hat) << ","
            << csv_double(c.pG1.std_error) << "," << csv_double(c.pGpos1.p_hat) << ","
            << csv_double(c.pGneg1.p_hat) << "," << csv_double(c.pG2.p_hat) << ","
            << csv_double(c.discrepancy_rate) << "," << csv_double(report.target) << "\n";
    }
    write_file(out_dir + "/sweep.csv", csv.str());

    JsonWriter w;
    w.open_obj();
    w.str("version", manifest.version);
    w.open_obj("config");
    write_config_fields(w, cfg);
    w.close_obj();
    write_manifest_fields(w, manifest);
    w.num("target", report.target);
    w.num("target_se", report.target_se);
    w.num("allowance", report.allowance);
    w.open_arr("cells");
    for (const auto& c : report.cells) {
        w.open_obj();
        w.num("n", c.n);
        w.num("a_n", c.a_n);
        w.num("R_n", c.R_n);
        w.num("b_kn", c.b);
        w.integer("trials", c.trials);
        w.num("mean_G", c.mean_G);
        w.num("mecke_G", c.mecke_G);
        w.num("p_G_ge1", c.pG1.p_hat);
        w.num("se_G_ge1", c.pG1.std_error);
        w.num("scaled_p_G_ge1", c.b > 0 ? c.pG1.p_hat / c.b : 0.0);
        w.num("p_Gpos_ge1", c.pGpos1.p_hat);
        w.num("p_Gneg_ge1", c.pGneg1.p_hat);
        w.num("p_G_ge2", c.pG2.p_hat);
        w.num("discrepancy_rate", c.discrepancy_rate);
        w.close_obj();
    }
    w.close_arr();
    w.boolean("final_covers_target", report.final_covers_target);
    w.boolean("final_pos_covers", report.final_pos_covers);
    w.boolean("final_neg_covers", report.final_neg_covers);
    w.num("final_pG2_over_b", report.final_pG2_over_b);
    w.boolean("discrepancy_trend_down", report.discrepancy_trend_down);
    w.close_obj();
    write_file(out_dir + "/sweep_summary.json", w.os.str() + "\n");
}

void emit_plot_data(const ExperimentResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ostringstream dat;
    dat << "# bin_lo bin_hi empirical se expected\n";
    for (const auto& bin : result.stats.eta_bins) {
        double hi = std::isinf(bin.hi) ? result.params.u_max : bin.hi;
        double expected = mecke_expected_bin(result.config, result.params, result.Dk.value,
                                             bin.lo, std::isinf(bin.hi) ? result.params.u_max + 1.0
                                                                        : bin.hi);
        dat << csv_double(bin.lo) << " " << csv_double(hi) << " " << csv_double(bin.mean_count)
            << " " << csv_double(bin.std_error) << " " << csv_double(expected) << "\n";
    }
    write_file(out_dir + "/eta_bins.dat", dat.str());
    write_file(out_dir + "/plot.py", kPlotScript);
}

void emit_plot_data(const SweepReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ostringstream dat;
    dat << "# n scaled_p lo hi target\n";
    for (const auto& c : report.cells) {
        double est = c.b > 0 ? c.pG1.p_hat / c.b : 0.0;
        double half = c.b > 0 ? 3.0 * c.pG1.std_error / c.b : 0.0;
        dat << csv_double(c.n) << " " << csv_double(est) << " " << csv_double(est - half) << " "
            << csv_double(est + half) << " " << csv_double(report.target) << "\n";
    }
    write_file(out_dir + "/sweep_scaled_p.dat", dat.str());
    write_file(out_dir + "/plot.py", kPlotScript);
}

} // namespace critfaces
