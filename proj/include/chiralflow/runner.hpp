// runner.hpp: configuration-driven experiments: single runs, sweeps and engine comparisons

#pragma once

#include "chiralflow/config.hpp"
#include "chiralflow/kernel.hpp"
#include "chiralflow/observables.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace chiralflow {

struct RunResult {
    RunConfig config;  // resolved (omega_c filled in)
    SystemSpectrum spectrum;
    BathModes modes;   // empty for kernel engines
    std::vector<double> t;
    std::array<cplx, 2> c0{};
    std::array<Eigen::MatrixXcd, 2> amplitudes;   // row i = lab-frame c_n(t_i)
    std::array<std::vector<double>, 2> norm_defect; // full propagator only
    FlowSeries series;
    FlowSegments segments;
    std::optional<RationalSolution> residues;     // Analytic3, first state of the pair
    std::vector<std::string> diagnostics;
};

RunResult run(const RunConfig& cfg);

json provenance(const RunConfig& resolved);
std::string series_csv(const FlowSeries& series, const FlowSegments& segments);
json segments_json(const RunResult& result);
json residue_report(const RationalSolution& sol);

// Writes <prefix>_series.csv, <prefix>_segments.json and, when requested, <prefix>_R.svg.
std::vector<std::filesystem::path> write_run(const RunResult& result, const std::filesystem::path& dir);

// Lab-frame trajectory table: t, Re/Im c_n, bath population, norm defect (f_k when verbose).
std::string trajectory_csv(const std::vector<AmplitudeState>& states, bool verbose);

struct SweepPoint {
    double value{0.0};
    bool ok{false};
    std::string error;
    FlowSeries series;
    FlowSegments segments;
};

struct SweepResult {
    RunConfig base;  // resolved base configuration
    SweepSpec spec;
    std::vector<SweepPoint> points;

    bool all_failed() const;
};

// Configuration of sweep point `index`. Shared policy: one bath (seed and centre taken
// from the resolved base). Resample policy: seed + index and a per-point centre.
RunConfig sweep_point_config(const RunConfig& base, const SweepSpec& spec, std::size_t index);

// Points run on up to spec.workers threads; rows keep the order of spec.values.
SweepResult sweep(const RunConfig& base, const SweepSpec& spec);

std::string sweep_csv(const SweepResult& result);
json sweep_json(const SweepResult& result);

struct CompareReport {
    Engine first;
    Engine second;
    double max_abs_dD{0.0};
    double max_abs_dR{0.0};
    double max_abs_damplitude{0.0};  // max | |c_n|_1 - |c_n|_2 | over both states
    json provenance;
};

CompareReport compare(const RunConfig& cfg, Engine first, Engine second);
json to_json(const CompareReport& report);

} // namespace chiralflow
