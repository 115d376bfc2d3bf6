#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "optbench/random.hpp"

namespace optbench {

// A candidate solution: one real value per search-space coordinate.
using Solution = std::vector<double>;

// Rectangular search domain [lower_j, upper_j] per coordinate.
class SearchSpace {
public:
    SearchSpace(std::vector<double> lower, std::vector<double> upper);

    int dims() const { return static_cast<int>(lower_.size()); }
    double lower(int j) const { return lower_[j]; }
    double upper(int j) const { return upper_[j]; }
    double range(int j) const { return upper_[j] - lower_[j]; }

    bool contains(const Solution& x) const;
    Solution clamp(Solution x) const;
    Solution sample(RandomSource& rng) const;

    // Maps into / out of the unit hypercube.
    Solution normalize(const Solution& x) const;
    Solution denormalize(const Solution& u) const;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

enum class Stage { BO, EA };

// One evaluated candidate. Objective values follow the maximization
// convention throughout; minimization benchmarks are negated upstream.
// eval_s holds the simulated per-evaluation cost; the gain arithmetic
// below takes t_e as an explicit parameter instead so one trace can be
// analyzed under several evaluation-time scenarios.
struct IterationRecord {
    int index = 0; // 1-based, contiguous within a trace
    Solution x;
    double f = 0.0;
    double overhead_s = 0.0;
    double eval_s = 0.0;
    Stage stage = Stage::EA;
};

struct Trace {
    std::vector<IterationRecord> records;
    std::uint64_t seed = 0;
    std::string algorithm;

    int size() const { return static_cast<int>(records.size()); }
    const IterationRecord& at(int i) const { return records[static_cast<std::size_t>(i - 1)]; }
};

struct GainEntry {
    int iteration = 0;  // i; the window is (k, i] with k = i - w
    double gain = 0.0;  // f'_i - f'_k
    double cost = 0.0;  // seconds spent on iterations k+1..i
    double efficiency = 0.0; // gain / cost
};

struct GainSeries {
    int window = 10;
    std::vector<GainEntry> entries;
};

// Running maximum of f_1..f_i. Indices are 1-based.
double best_so_far(const Trace& trace, int i);
std::vector<double> best_so_far_curve(const Trace& trace);

// f'_i - f'_k; nonnegative by monotonicity of the running maximum.
double gain(const Trace& trace, int k, int i);

// Computation time spent on iterations k+1..i under evaluation time t_e,
// i.e. sum of (overhead_j + t_e). Equals t_i - t_k in timestamp terms.
double interval_cost(const Trace& trace, int k, int i, double t_e);

// gain / interval_cost.
double time_efficiency(const Trace& trace, int k, int i, double t_e);

// Cumulative timestamps t_i = sum_{j<=i} (overhead_j + t_e), with t_0 = 0
// implied (not stored).
std::vector<double> timestamps(const Trace& trace, double t_e);

// Windowed efficiency series: one entry per i in [w+1, N] with k = i - w.
GainSeries gain_series(const Trace& trace, int window, double t_e);

// Trace CSV, schema: iter,f,f_best,overhead_s. Floats carry 9 significant
// digits.
void write_trace_csv(const Trace& trace, std::ostream& out);
void write_trace_csv(const Trace& trace, const std::string& path);
Trace read_trace_csv(const std::string& path);

// Renders a double with 9 significant digits (the CSV float format).
std::string format_g9(double v);

} // namespace optbench
