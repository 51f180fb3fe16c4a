#pragma once

#include <string>

#include "critfaces/engine.hpp"

// Config parsing (flat JSON), result serialization (summary JSON, atoms and
// sweep CSV, plot data). Every emitted file is a pure function of
// (config, seed, artifact version): no wall-clock content.

namespace critfaces {

inline constexpr const char* kArtifactVersion = "critfaces 0.1.0";

struct RunManifest {
    std::string version = kArtifactVersion;
    ExperimentConfig config;
    ConstantEstimate Dk;
    // Wall-clock timestamps are reported on the console only; serialized
    // outputs must stay byte-reproducible.
    double wall_seconds = 0.0;
};

// Flat JSON config; unknown keys are rejected. Missing fields fall back to
// documented defaults. Validation runs before returning.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text);

std::string config_to_json(const ExperimentConfig& cfg);

// summary.json + atoms.csv under out_dir; refuses to write without trials.
void write_results(const ExperimentResult& result, const RunManifest& manifest,
                   const std::string& out_dir);

// sweep.csv + sweep summary JSON.
void write_sweep(const SweepReport& report, const ExperimentConfig& cfg,
                 const RunManifest& manifest, const std::string& out_dir);

// Plain-text plot data (scaled probability vs n with CI columns and the
// target line; per-bin empirical vs expected intensity) plus a plotting
// script that consumes them.
void emit_plot_data(const ExperimentResult& result, const std::string& out_dir);
void emit_plot_data(const SweepReport& report, const std::string& out_dir);

} // namespace critfaces
