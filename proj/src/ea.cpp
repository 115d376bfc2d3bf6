#include "optbench/ea.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace optbench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

double learning_rate_coord(int dims)
{
    return 1.0 / std::sqrt(2.0 * std::sqrt(static_cast<double>(dims)));
}

double learning_rate_global(int dims)
{
    return 1.0 / std::sqrt(2.0 * static_cast<double>(dims));
}

const Individual& tournament_select(const std::vector<Individual>& pop, int size,
                                    RandomSource& rng)
{
    if (pop.empty())
        throw std::invalid_argument("tournament_select: empty population");
    if (size < 1 || size > static_cast<int>(pop.size()))
        throw std::invalid_argument("tournament_select: size must lie in [1, pop]");

    // partial Fisher-Yates for distinct entrants
    std::vector<std::size_t> idx(pop.size());
    std::iota(idx.begin(), idx.end(), 0);
    const Individual* best = nullptr;
    for (int t = 0; t < size; ++t) {
        const std::size_t pick = t + rng.below(idx.size() - t);
        std::swap(idx[t], idx[pick]);
        const Individual& entrant = pop[idx[t]];
        if (!entrant.fitness)
            throw std::invalid_argument("tournament_select: unevaluated individual");
        if (!best || *entrant.fitness > *best->fitness)
            best = &entrant;
    }
    return *best;
}

Individual arithmetic_crossover(const Individual& a, const Individual& b)
{
    if (a.x.size() != b.x.size())
        throw std::invalid_argument("arithmetic_crossover: dimension mismatch");
    Individual child;
    child.x.resize(a.x.size());
    child.sigmas.resize(a.sigmas.size());
    for (std::size_t j = 0; j < a.x.size(); ++j)
        child.x[j] = 0.5 * a.x[j] + 0.5 * b.x[j];
    for (std::size_t j = 0; j < a.sigmas.size(); ++j)
        child.sigmas[j] = 0.5 * a.sigmas[j] + 0.5 * b.sigmas[j];
    return child;
}

Individual self_adaptive_mutate(const Individual& ind, const SearchSpace& space,
                                const EAConfig& cfg, RandomSource& rng)
{
    const int d = space.dims();
    const double tau = learning_rate_coord(d);
    const double tau_prime = learning_rate_global(d);
    const double global_noise = tau_prime * rng.normal01();

    Individual out;
    out.x.resize(static_cast<std::size_t>(d));
    out.sigmas.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        const double eps0 = cfg.epsilon0_factor * space.range(j);
        double sigma = ind.sigmas[static_cast<std::size_t>(j)] *
                       std::exp(global_noise + tau * rng.normal01());
        sigma = std::max(sigma, eps0);
        out.sigmas[static_cast<std::size_t>(j)] = sigma;
        const double moved = ind.x[static_cast<std::size_t>(j)] + sigma * rng.normal01();
        out.x[static_cast<std::size_t>(j)] =
            std::min(std::max(moved, space.lower(j)), space.upper(j));
    }
    return out;
}

Individual make_individual(Solution x, const SearchSpace& space, const EAConfig& cfg)
{
    Individual ind;
    ind.x = std::move(x);
    ind.sigmas.resize(static_cast<std::size_t>(space.dims()));
    for (int j = 0; j < space.dims(); ++j)
        ind.sigmas[static_cast<std::size_t>(j)] = cfg.sigma_init_factor * space.range(j);
    return ind;
}

namespace detail {

Individual make_offspring(const std::vector<Individual>& pop, const EAConfig& cfg,
                          RandomSource& rng, const MutateFn& mutate)
{
    const Individual& parent = tournament_select(pop, cfg.tournament_size, rng);
    Individual child;
    if (rng.uniform01() < cfg.crossover_rate) {
        const Individual& other = tournament_select(pop, cfg.tournament_size, rng);
        child = arithmetic_crossover(parent, other);
    } else {
        child = parent;
    }
    child.fitness.reset();
    if (rng.uniform01() < cfg.mutation_rate)
        child = mutate(child, rng);
    return child;
}

std::vector<Individual> select_survivors(std::vector<Individual> parents,
                                         std::vector<Individual> offspring, int p)
{
    parents.reserve(parents.size() + offspring.size());
    for (auto& o : offspring)
        parents.push_back(std::move(o));
    std::stable_sort(parents.begin(), parents.end(), [](const Individual& a, const Individual& b) {
        return *a.fitness > *b.fitness;
    });
    parents.resize(static_cast<std::size_t>(p));
    return parents;
}

} // namespace detail

Trace run_ea(const Objective& objective, const SearchSpace& space, const EAConfig& cfg,
             int iters, std::optional<std::vector<Individual>> initial_pop)
{
    const int p = cfg.pop_size;
    if (p < 2)
        throw std::invalid_argument("run_ea: pop_size must be >= 2");
    if (cfg.tournament_size > p)
        throw std::invalid_argument("run_ea: tournament_size must be <= pop_size");
    if (iters < p)
        throw std::invalid_argument("run_ea: iters must be >= pop_size");
    if (initial_pop && static_cast<int>(initial_pop->size()) != p)
        throw std::invalid_argument("run_ea: initial population must have pop_size members");

    Trace trace;
    trace.seed = cfg.seed;
    trace.algorithm = "ea";
    Mt19937Source rng(cfg.seed);

    auto evaluate = [&](Individual& ind, double overhead) {
        double f;
        try {
            f = objective(ind.x);
        } catch (const std::exception& e) {
            throw std::runtime_error("objective failed at iteration " +
                                     std::to_string(trace.size() + 1) + ": " + e.what());
        }
        ind.fitness = f;
        IterationRecord rec;
        rec.index = trace.size() + 1;
        rec.x = ind.x;
        rec.f = f;
        rec.overhead_s = overhead;
        rec.stage = Stage::EA;
        trace.records.push_back(std::move(rec));
    };

    std::vector<Individual> pop;
    pop.reserve(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        const auto t0 = Clock::now();
        Individual ind =
            initial_pop ? std::move((*initial_pop)[static_cast<std::size_t>(i)])
                        : make_individual(space.sample(rng), space, cfg);
        const double overhead = seconds_since(t0);
        evaluate(ind, overhead);
        pop.push_back(std::move(ind));
    }

    const auto mutate = [&](const Individual& ind, RandomSource& r) {
        return self_adaptive_mutate(ind, space, cfg, r);
    };

    double selection_carry = 0.0; // survivor-selection time, charged to the next generation
    while (trace.size() < iters) {
        const int m = std::min(p, iters - trace.size());
        std::vector<Individual> offspring;
        offspring.reserve(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) {
            const auto t0 = Clock::now();
            Individual child = detail::make_offspring(pop, cfg, rng, mutate);
            const double overhead = seconds_since(t0) + selection_carry / m;
            evaluate(child, overhead);
            offspring.push_back(std::move(child));
        }
        selection_carry = 0.0;
        if (trace.size() < iters) {
            const auto t0 = Clock::now();
            pop = detail::select_survivors(std::move(pop), std::move(offspring), p);
            selection_carry = seconds_since(t0);
        }
    }
    return trace;
}

} // namespace optbench
