#include "optbench/bench.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace optbench {

namespace {

double griewank(const Solution& x)
{
    double sum = 0.0, prod = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        sum += x[j] * x[j] / 4000.0;
        prod *= std::cos(x[j] / std::sqrt(static_cast<double>(j + 1)));
    }
    return sum - prod + 1.0;
}

double rastrigin(const Solution& x)
{
    double f = 10.0 * static_cast<double>(x.size());
    for (double xj : x)
        f += xj * xj - 10.0 * std::cos(2.0 * std::numbers::pi * xj);
    return f;
}

double schwefel_shifted(const Solution& x)
{
    double sum = 0.0;
    for (double xj : x) {
        const double z = xj + kSchwefelShift;
        sum += z * std::sin(std::sqrt(std::abs(z)));
    }
    return kSchwefelOffset * static_cast<double>(x.size()) - sum;
}

} // namespace

double evaluate(const BenchmarkFunction& fn, const Solution& x)
{
    if (static_cast<int>(x.size()) != fn.dims)
        throw std::invalid_argument("evaluate: solution has " + std::to_string(x.size()) +
                                    " coordinates, function expects " + std::to_string(fn.dims));
    switch (fn.id) {
    case BenchmarkId::Griewank:
        return griewank(x);
    case BenchmarkId::Rastrigin:
        return rastrigin(x);
    case BenchmarkId::Schwefel:
        return schwefel_shifted(x);
    }
    throw std::logic_error("evaluate: unknown benchmark");
}

SearchSpace domain(const BenchmarkFunction& fn)
{
    double lo = 0.0, hi = 0.0;
    switch (fn.id) {
    case BenchmarkId::Griewank:
        lo = -600.0;
        hi = 600.0;
        break;
    case BenchmarkId::Rastrigin:
        lo = -5.12;
        hi = 5.12;
        break;
    case BenchmarkId::Schwefel:
        lo = -500.0 - kSchwefelShift;
        hi = 500.0 - kSchwefelShift;
        break;
    }
    const auto d = static_cast<std::size_t>(fn.dims);
    return SearchSpace(std::vector<double>(d, lo), std::vector<double>(d, hi));
}

std::string_view benchmark_name(BenchmarkId id)
{
    switch (id) {
    case BenchmarkId::Griewank:
        return "griewank";
    case BenchmarkId::Rastrigin:
        return "rastrigin";
    case BenchmarkId::Schwefel:
        return "schwefel";
    }
    return "?";
}

std::optional<BenchmarkId> parse_benchmark(std::string_view name)
{
    if (name == "griewank")
        return BenchmarkId::Griewank;
    if (name == "rastrigin")
        return BenchmarkId::Rastrigin;
    if (name == "schwefel")
        return BenchmarkId::Schwefel;
    return std::nullopt;
}

} // namespace optbench
