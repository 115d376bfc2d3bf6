#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optbench/bea.hpp"
#include "optbench/bench.hpp"
#include "optbench/bo.hpp"
#include "optbench/core.hpp"
#include "optbench/ea.hpp"

namespace optbench {

enum class AlgorithmKind { BO, EA, BEA };

struct AlgorithmConfig {
    std::string label;     // appears in CSV rows and plot legends
    AlgorithmKind kind = AlgorithmKind::BO;
    BOConfig bo{};
    EAConfig ea{};
    BEAConfig bea{};
    // GP length scale; when unset the per-function default applies
    // (0.5 for Schwefel, 0.1 otherwise).
    std::optional<double> theta;
};

AlgorithmConfig default_algorithm(AlgorithmKind kind);
std::optional<AlgorithmKind> parse_algorithm(std::string_view name);
std::string_view algorithm_name(AlgorithmKind kind);
double default_theta(BenchmarkId id);

struct ExperimentSpec {
    std::vector<BenchmarkFunction> functions;
    std::vector<AlgorithmConfig> algorithms;
    std::vector<double> eval_times = {0.1, 1.0, 10.0}; // applied at analysis time
    int iters = 600;
    int repetitions = 10;
    std::uint64_t base_seed = 1;
    int window = 10;
    int workers = 0; // 0: hardware concurrency
};

// One executed run analyzed under one simulated evaluation time.
struct RunResult {
    std::string function;
    std::string algorithm;
    double eval_time = 0.0;
    std::uint64_t seed = 0;
    Trace trace;
    std::vector<double> times;     // timestamps under eval_time
    std::vector<double> best_curve;
    GainSeries gains;
    std::optional<int> switch_point; // BEA: configured switch iteration
    std::string error;               // nonempty if the run failed
};

// Executes one run per (function x algorithm x seed) on a bounded worker
// pool, then derives one RunResult per eval_time. Seeds are
// base_seed + replicate index; outputs do not depend on the worker count.
std::vector<RunResult> run_experiment(const ExperimentSpec& spec);

// Smallest iteration i where the EA's windowed efficiency exceeds the
// BO's for `persistence` consecutive entries.
std::optional<int> detect_switch_point(const GainSeries& bo, const GainSeries& ea,
                                       int persistence);

// Entrywise mean of several series sharing window and iteration range.
GainSeries average_gain_series(const std::vector<const GainSeries*>& series);

struct MannWhitneyResult {
    double p = 1.0;
    double u = 0.0;  // rank-sum statistic of the first sample
    bool ties = false;
    bool exact = false;
};

// One-sided Mann-Whitney U: p-value that `a` stochastically exceeds `b`.
// Exact for samples of at most 20 without ties, otherwise a tie-corrected
// normal approximation. All-equal samples report p = 0.5 with the tie
// flag set.
MannWhitneyResult mann_whitney_greater(std::span<const double> a, std::span<const double> b);

// Summary CSV schema:
// function,algorithm,te,seed,final_best,total_comp_time_s,switch_point
void export_csv(const std::vector<RunResult>& results, const std::string& dir);
std::string trace_csv_name(const RunResult& r);

struct SummaryRow {
    std::string function;
    std::string algorithm;
    double te = 0.0;
    std::uint64_t seed = 0;
    double final_best = 0.0;
    double total_comp_time_s = 0.0;
    std::optional<int> switch_point;
};
std::vector<SummaryRow> read_summary_csv(const std::string& path);

// Reloads RunResults (traces plus derived series) from an export directory.
std::vector<RunResult> load_results(const std::string& dir, int window = 10);

enum class PlotKind { ObjectiveVsTime, GainVsIter, OverheadVsIter };

struct PlotOptions {
    bool log_x = false;
    int grid_points = 200; // common time grid for mean/band curves
    std::optional<double> switch_marker; // vertical line position (x units)
};

// Mean line with a +/- 2 sd band per algorithm, written as a standalone
// SVG. All results must belong to one function.
void render_plot(const std::vector<RunResult>& results, PlotKind kind,
                 const std::string& path, const PlotOptions& options = {});

// Best-so-far value at the latest iteration completed by time t.
double step_interpolate(std::span<const double> times, std::span<const double> values,
                        double t);

} // namespace optbench
