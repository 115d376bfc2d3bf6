#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "optbench/core.hpp"

namespace optbench {

// Benchmark objectives with the global minimum 0 at the origin. Values are
// minimization values; the harness negates them so optimizers maximize.
enum class BenchmarkId { Griewank, Rastrigin, Schwefel };

struct BenchmarkFunction {
    BenchmarkId id = BenchmarkId::Griewank;
    int dims = 20;
};

// Schwefel is shifted so its optimizer 420.9687... lands on the origin.
inline constexpr double kSchwefelShift = 420.9687;
inline constexpr double kSchwefelOffset = 418.9829;

double evaluate(const BenchmarkFunction& fn, const Solution& x);

// Standard domains: Griewank [-600,600], Rastrigin [-5.12,5.12], Schwefel
// [-500,500] shifted by -420.9687.
SearchSpace domain(const BenchmarkFunction& fn);

std::string_view benchmark_name(BenchmarkId id);
std::optional<BenchmarkId> parse_benchmark(std::string_view name);

} // namespace optbench
