#include "optbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace optbench {

namespace fs = std::filesystem;

AlgorithmConfig default_algorithm(AlgorithmKind kind)
{
    AlgorithmConfig cfg;
    cfg.kind = kind;
    cfg.label = algorithm_name(kind);
    return cfg;
}

std::optional<AlgorithmKind> parse_algorithm(std::string_view name)
{
    if (name == "bo")
        return AlgorithmKind::BO;
    if (name == "ea")
        return AlgorithmKind::EA;
    if (name == "bea")
        return AlgorithmKind::BEA;
    return std::nullopt;
}

std::string_view algorithm_name(AlgorithmKind kind)
{
    switch (kind) {
    case AlgorithmKind::BO:
        return "bo";
    case AlgorithmKind::EA:
        return "ea";
    case AlgorithmKind::BEA:
        return "bea";
    }
    return "?";
}

double default_theta(BenchmarkId id)
{
    return id == BenchmarkId::Schwefel ? 0.5 : 0.1;
}

namespace {

struct RunJob {
    BenchmarkFunction function;
    AlgorithmConfig algorithm;
    std::uint64_t seed = 0;
};

Trace execute(const RunJob& job, int iters)
{
    const SearchSpace space = domain(job.function);
    const Objective objective = [fn = job.function](const Solution& x) {
        return -evaluate(fn, x); // maximization convention
    };
    const double theta =
        job.algorithm.theta ? *job.algorithm.theta : default_theta(job.function.id);

    switch (job.algorithm.kind) {
    case AlgorithmKind::BO: {
        BOConfig cfg = job.algorithm.bo;
        cfg.theta = theta;
        cfg.seed = job.seed;
        return run_bo(objective, space, cfg, iters);
    }
    case AlgorithmKind::EA: {
        EAConfig cfg = job.algorithm.ea;
        cfg.seed = job.seed;
        return run_ea(objective, space, cfg, iters);
    }
    case AlgorithmKind::BEA: {
        BEAConfig cfg = job.algorithm.bea;
        cfg.bo.theta = theta;
        cfg.seed = job.seed;
        return run_bea(objective, space, cfg, iters);
    }
    }
    throw std::logic_error("execute: unknown algorithm kind");
}

} // namespace

std::vector<RunResult> run_experiment(const ExperimentSpec& spec)
{
    if (spec.repetitions < 1)
        throw std::invalid_argument("run_experiment: repetitions must be >= 1");
    if (spec.functions.empty() || spec.algorithms.empty())
        throw std::invalid_argument("run_experiment: need at least one function and algorithm");
    if (spec.eval_times.empty())
        throw std::invalid_argument("run_experiment: need at least one evaluation time");
    for (double te : spec.eval_times)
        if (te < 0.0)
            throw std::invalid_argument("run_experiment: evaluation times must be >= 0");

    std::vector<RunJob> jobs;
    for (const auto& fn : spec.functions)
        for (const auto& algo : spec.algorithms)
            for (int rep = 0; rep < spec.repetitions; ++rep)
                jobs.push_back({fn, algo, spec.base_seed + static_cast<std::uint64_t>(rep)});

    struct RawRun {
        Trace trace;
        std::string error;
    };
    std::vector<RawRun> raw(jobs.size());

    unsigned workers = spec.workers > 0 ? static_cast<unsigned>(spec.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(jobs.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size())
                return;
            try {
                raw[i].trace = execute(jobs[i], spec.iters);
            } catch (const std::exception& e) {
                raw[i].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    std::vector<RunResult> results;
    results.reserve(jobs.size() * spec.eval_times.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        for (double te : spec.eval_times) {
            RunResult r;
            r.function = benchmark_name(jobs[i].function.id);
            r.algorithm = jobs[i].algorithm.label;
            r.eval_time = te;
            r.seed = jobs[i].seed;
            r.error = raw[i].error;
            if (r.error.empty()) {
                r.trace = raw[i].trace;
                for (auto& rec : r.trace.records)
                    rec.eval_s = te;
                r.times = timestamps(r.trace, te);
                r.best_curve = best_so_far_curve(r.trace);
                if (r.trace.size() > spec.window)
                    r.gains = gain_series(r.trace, spec.window, te);
                if (jobs[i].algorithm.kind == AlgorithmKind::BEA)
                    r.switch_point = jobs[i].algorithm.bea.switch_point;
            }
            results.push_back(std::move(r));
        }
    }
    return results;
}

std::optional<int> detect_switch_point(const GainSeries& bo, const GainSeries& ea,
                                       int persistence)
{
    if (persistence < 1)
        throw std::invalid_argument("detect_switch_point: persistence must be >= 1");
    if (bo.window != ea.window || bo.entries.size() != ea.entries.size())
        throw std::invalid_argument("detect_switch_point: series do not share window/range");
    for (std::size_t i = 0; i < bo.entries.size(); ++i)
        if (bo.entries[i].iteration != ea.entries[i].iteration)
            throw std::invalid_argument("detect_switch_point: series do not share iterations");

    const std::size_t n = bo.entries.size();
    const auto m = static_cast<std::size_t>(persistence);
    if (n < m)
        return std::nullopt;
    for (std::size_t i = 0; i + m <= n; ++i) {
        bool all = true;
        for (std::size_t j = i; j < i + m; ++j) {
            if (!(ea.entries[j].efficiency > bo.entries[j].efficiency)) {
                all = false;
                break;
            }
        }
        if (all)
            return bo.entries[i].iteration;
    }
    return std::nullopt;
}

GainSeries average_gain_series(const std::vector<const GainSeries*>& series)
{
    if (series.empty())
        throw std::invalid_argument("average_gain_series: no series");
    const GainSeries& first = *series.front();
    for (const auto* s : series)
        if (s->window != first.window || s->entries.size() != first.entries.size())
            throw std::invalid_argument("average_gain_series: mismatched series");

    GainSeries avg;
    avg.window = first.window;
    avg.entries.resize(first.entries.size());
    for (std::size_t i = 0; i < first.entries.size(); ++i) {
        GainEntry& e = avg.entries[i];
        e.iteration = first.entries[i].iteration;
        for (const auto* s : series) {
            if (s->entries[i].iteration != e.iteration)
                throw std::invalid_argument("average_gain_series: mismatched iterations");
            e.gain += s->entries[i].gain;
            e.cost += s->entries[i].cost;
            e.efficiency += s->entries[i].efficiency;
        }
        const auto n = static_cast<double>(series.size());
        e.gain /= n;
        e.cost /= n;
        e.efficiency /= n;
    }
    return avg;
}

std::string trace_csv_name(const RunResult& r)
{
    return r.function + "_" + r.algorithm + "_te" + format_g9(r.eval_time) + "_seed" +
           std::to_string(r.seed) + ".csv";
}

void export_csv(const std::vector<RunResult>& results, const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path summary_path = fs::path(dir) / "summary.csv";
    std::ofstream summary(summary_path);
    if (!summary)
        throw std::runtime_error("cannot open for writing: " + summary_path.string());
    summary << "function,algorithm,te,seed,final_best,total_comp_time_s,switch_point\n";
    for (const auto& r : results) {
        if (!r.error.empty())
            continue;
        const fs::path trace_path = fs::path(dir) / trace_csv_name(r);
        write_trace_csv(r.trace, trace_path.string());
        summary << r.function << ',' << r.algorithm << ',' << format_g9(r.eval_time) << ','
                << r.seed << ',' << format_g9(r.best_curve.back()) << ','
                << format_g9(r.times.back()) << ','
                << (r.switch_point ? std::to_string(*r.switch_point) : "") << '\n';
    }
    if (!summary.good())
        throw std::runtime_error("write failed: " + summary_path.string());
}

std::vector<SummaryRow> read_summary_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line) ||
        line != "function,algorithm,te,seed,final_best,total_comp_time_s,switch_point")
        throw std::runtime_error("bad summary CSV header in " + path);
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        SummaryRow r;
        std::string field;
        std::getline(row, r.function, ',');
        std::getline(row, r.algorithm, ',');
        std::getline(row, field, ',');
        r.te = std::stod(field);
        std::getline(row, field, ',');
        r.seed = std::stoull(field);
        std::getline(row, field, ',');
        r.final_best = std::stod(field);
        std::getline(row, field, ',');
        r.total_comp_time_s = std::stod(field);
        if (std::getline(row, field, ',') && !field.empty())
            r.switch_point = std::stoi(field);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<RunResult> load_results(const std::string& dir, int window)
{
    const auto rows = read_summary_csv((fs::path(dir) / "summary.csv").string());
    std::vector<RunResult> results;
    results.reserve(rows.size());
    for (const auto& row : rows) {
        RunResult r;
        r.function = row.function;
        r.algorithm = row.algorithm;
        r.eval_time = row.te;
        r.seed = row.seed;
        r.switch_point = row.switch_point;
        const fs::path trace_path = fs::path(dir) / trace_csv_name(r);
        r.trace = read_trace_csv(trace_path.string());
        r.trace.seed = row.seed;
        r.trace.algorithm = row.algorithm;
        for (auto& rec : r.trace.records)
            rec.eval_s = row.te;
        r.times = timestamps(r.trace, row.te);
        r.best_curve = best_so_far_curve(r.trace);
        if (r.trace.size() > window)
            r.gains = gain_series(r.trace, window, row.te);
        results.push_back(std::move(r));
    }
    return results;
}

double step_interpolate(std::span<const double> times, std::span<const double> values,
                        double t)
{
    // last completed iteration at time t; NaN before the first one
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin())
        return std::numeric_limits<double>::quiet_NaN();
    const auto i = static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
    return values[i];
}

} // namespace optbench
