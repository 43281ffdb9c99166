#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "smoothnet/engine.hpp"
#include "smoothnet/schedule.hpp"

namespace smoothnet {

struct NetworkSpec {
    enum class Kind { Ccc, PeriodicFile, ScheduleFile };
    Kind kind = Kind::Ccc;
    int log_n = 16;                // Ccc
    CccOrientation orient = CccOrientation::AllUp;
    std::uint64_t orient_seed = 0; // for randomly drawn fixed orientations
    std::string path;              // PeriodicFile / ScheduleFile
    int periods = 1;               // PeriodicFile
};

Schedule build_network(const NetworkSpec& spec);

struct ExperimentConfig {
    NetworkSpec network;
    std::vector<double> alphas{0.0};
    int trials = 100;
    InputDist input = InputDist::uniform();
    std::uint64_t base_seed = 0;
    std::string csv_path; // optional
    std::string svg_path; // optional
    IdealMode mode = IdealMode::Float;

    void validate() const; // throws std::invalid_argument
};

struct ResultRow {
    std::uint32_t n = 0;
    double alpha = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    std::int64_t discrepancy = 0;
    double max_above_mean = 0.0;
    double min_below_mean = 0.0;
    double runtime_ms = 0.0; // informational only, excluded from determinism
};

struct AlphaSummary {
    double alpha = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double bound_lower = 0.0; // NaN when the network is not a CCC
    double bound_upper = 0.0;
};

struct SweepResult {
    std::vector<ResultRow> rows;        // ordered by (alpha index, trial index)
    std::vector<AlphaSummary> summary;
};

// Runs trials x alphas of the discrete process. Seeds derive as
// base_seed + alpha_index * trials + trial, so output is identical for the
// parallel and the serial reference version, and across repeat runs.
SweepResult run_sweep(const ExperimentConfig& cfg);
SweepResult run_sweep_serial(const ExperimentConfig& cfg);

// Header: n,alpha,trial,seed,discrepancy,max_above_mean,min_below_mean,runtime_ms
void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

// Minimal polyline chart of mean discrepancy vs alpha with the lower/upper
// bound curves overlaid.
void emit_summary_svg(const std::vector<AlphaSummary>& summary, std::ostream& out);
void emit_summary_svg(const std::vector<AlphaSummary>& summary, const std::string& path);

} // namespace smoothnet
