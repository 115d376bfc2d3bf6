#include "optbench/core.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace optbench {

SearchSpace::SearchSpace(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper))
{
    if (lower_.empty() || lower_.size() != upper_.size())
        throw std::invalid_argument("SearchSpace: bounds must be nonempty and equal-length");
    for (std::size_t j = 0; j < lower_.size(); ++j)
        if (!(lower_[j] < upper_[j]))
            throw std::invalid_argument("SearchSpace: lower[" + std::to_string(j) + "] must be < upper");
}

bool SearchSpace::contains(const Solution& x) const
{
    if (x.size() != lower_.size())
        return false;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (x[j] < lower_[j] || x[j] > upper_[j])
            return false;
    return true;
}

Solution SearchSpace::clamp(Solution x) const
{
    for (std::size_t j = 0; j < x.size(); ++j)
        x[j] = std::min(std::max(x[j], lower_[j]), upper_[j]);
    return x;
}

Solution SearchSpace::sample(RandomSource& rng) const
{
    Solution x(lower_.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        x[j] = rng.uniform(lower_[j], upper_[j]);
    return x;
}

Solution SearchSpace::normalize(const Solution& x) const
{
    Solution u(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        u[j] = (x[j] - lower_[j]) / (upper_[j] - lower_[j]);
    return u;
}

Solution SearchSpace::denormalize(const Solution& u) const
{
    Solution x(u.size());
    for (std::size_t j = 0; j < u.size(); ++j)
        x[j] = lower_[j] + u[j] * (upper_[j] - lower_[j]);
    return x;
}

namespace {

void check_index(const Trace& trace, int i, const char* what)
{
    if (i < 1 || i > trace.size())
        throw std::out_of_range(std::string(what) + ": index " + std::to_string(i) +
                                " outside 1.." + std::to_string(trace.size()));
}

void check_interval(const Trace& trace, int k, int i, const char* what)
{
    check_index(trace, k, what);
    check_index(trace, i, what);
    if (k >= i)
        throw std::invalid_argument(std::string(what) + ": require k < i, got k=" +
                                    std::to_string(k) + " i=" + std::to_string(i));
}

} // namespace

double best_so_far(const Trace& trace, int i)
{
    check_index(trace, i, "best_so_far");
    double best = trace.at(1).f;
    for (int j = 2; j <= i; ++j)
        best = std::max(best, trace.at(j).f);
    return best;
}

std::vector<double> best_so_far_curve(const Trace& trace)
{
    std::vector<double> curve;
    curve.reserve(trace.records.size());
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : trace.records) {
        best = std::max(best, r.f);
        curve.push_back(best);
    }
    return curve;
}

double gain(const Trace& trace, int k, int i)
{
    check_interval(trace, k, i, "gain");
    return best_so_far(trace, i) - best_so_far(trace, k);
}

double interval_cost(const Trace& trace, int k, int i, double t_e)
{
    check_interval(trace, k, i, "interval_cost");
    if (t_e < 0)
        throw std::invalid_argument("interval_cost: t_e must be >= 0");
    double cost = 0.0;
    for (int j = k + 1; j <= i; ++j)
        cost += trace.at(j).overhead_s + t_e;
    return cost;
}

double time_efficiency(const Trace& trace, int k, int i, double t_e)
{
    const double cost = interval_cost(trace, k, i, t_e);
    if (cost <= 0.0)
        throw std::domain_error("time_efficiency: zero interval cost");
    return gain(trace, k, i) / cost;
}

std::vector<double> timestamps(const Trace& trace, double t_e)
{
    if (t_e < 0)
        throw std::invalid_argument("timestamps: t_e must be >= 0");
    std::vector<double> ts;
    ts.reserve(trace.records.size());
    double t = 0.0;
    for (const auto& r : trace.records) {
        t += r.overhead_s + t_e;
        ts.push_back(t);
    }
    return ts;
}

GainSeries gain_series(const Trace& trace, int window, double t_e)
{
    if (window < 1)
        throw std::invalid_argument("gain_series: window must be >= 1");
    if (trace.size() <= window)
        throw std::invalid_argument("gain_series: trace of length " + std::to_string(trace.size()) +
                                    " too short for window " + std::to_string(window));
    const auto curve = best_so_far_curve(trace);
    GainSeries series;
    series.window = window;
    series.entries.reserve(static_cast<std::size_t>(trace.size() - window));
    for (int i = window + 1; i <= trace.size(); ++i) {
        const int k = i - window;
        GainEntry e;
        e.iteration = i;
        e.gain = curve[static_cast<std::size_t>(i - 1)] - curve[static_cast<std::size_t>(k - 1)];
        e.cost = interval_cost(trace, k, i, t_e);
        e.efficiency = e.gain / e.cost;
        series.entries.push_back(e);
    }
    return series;
}

std::string format_g9(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_trace_csv(const Trace& trace, std::ostream& out)
{
    out << "iter,f,f_best,overhead_s\n";
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : trace.records) {
        best = std::max(best, r.f);
        out << r.index << ',' << format_g9(r.f) << ',' << format_g9(best) << ','
            << format_g9(r.overhead_s) << '\n';
    }
}

void write_trace_csv(const Trace& trace, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    write_trace_csv(trace, out);
    if (!out.good())
        throw std::runtime_error("write failed: " + path);
}

Trace read_trace_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "iter,f,f_best,overhead_s")
        throw std::runtime_error("bad trace CSV header in " + path);
    Trace trace;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string field;
        IterationRecord rec;
        std::getline(row, field, ',');
        rec.index = std::stoi(field);
        std::getline(row, field, ',');
        rec.f = std::stod(field);
        std::getline(row, field, ','); // f_best, recomputable
        std::getline(row, field, ',');
        rec.overhead_s = std::stod(field);
        trace.records.push_back(std::move(rec));
    }
    for (std::size_t i = 0; i < trace.records.size(); ++i)
        if (trace.records[i].index != static_cast<int>(i) + 1)
            throw std::runtime_error("non-contiguous iteration indices in " + path);
    return trace;
}

} // namespace optbench
