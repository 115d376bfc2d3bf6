#pragma once

#include <optional>
#include <vector>

#include "optbench/bo.hpp" // Objective
#include "optbench/core.hpp"

namespace optbench {

// Real-valued individual with per-coordinate self-adaptive step sizes.
struct Individual {
    Solution x;
    std::vector<double> sigmas;
    std::optional<double> fitness;
};

struct EAConfig {
    int pop_size = 10;
    int tournament_size = 2;
    double mutation_rate = 0.8;  // probability an offspring is mutated
    double crossover_rate = 0.7; // probability an offspring is recombined
    double sigma_init_factor = 0.1; // of the coordinate range
    double epsilon0_factor = 1e-4;  // step-size floor, of the coordinate range
    std::uint64_t seed = 0;
};

// Self-adaptation learning rates for an n-dimensional problem:
// tau = 1/sqrt(2 sqrt(n)) per coordinate, tau' = 1/sqrt(2n) global.
double learning_rate_coord(int dims);
double learning_rate_global(int dims);

// Best of `size` distinct uniform draws from the population.
const Individual& tournament_select(const std::vector<Individual>& pop, int size,
                                    RandomSource& rng);

// Midpoint blend of both parents' coordinates and step sizes.
Individual arithmetic_crossover(const Individual& a, const Individual& b);

// sigma'_j = sigma_j exp(tau' N + tau N_j) floored at epsilon0_j, then
// x'_j = x_j + sigma'_j N_j, clamped to the domain.
Individual self_adaptive_mutate(const Individual& ind, const SearchSpace& space,
                                const EAConfig& cfg, RandomSource& rng);

// Fresh individual: position sampled (or given) with sigma_init step sizes.
Individual make_individual(Solution x, const SearchSpace& space, const EAConfig& cfg);

// Generational loop with tournament parents, arithmetic recombination,
// self-adaptive mutation and (mu+lambda) elitist survivor selection. Runs
// until exactly `iters` evaluations; each evaluation appends one record.
Trace run_ea(const Objective& objective, const SearchSpace& space, const EAConfig& cfg,
             int iters, std::optional<std::vector<Individual>> initial_pop = std::nullopt);

namespace detail {

using MutateFn = std::function<Individual(const Individual&, RandomSource&)>;

// select -> maybe crossover -> maybe mutate. Shared with the EA stage of
// the hybrid, which plugs in the gain-aware mutation.
Individual make_offspring(const std::vector<Individual>& pop, const EAConfig& cfg,
                          RandomSource& rng, const MutateFn& mutate);

// Best pop_size of parents plus offspring (ties keep earlier creation).
std::vector<Individual> select_survivors(std::vector<Individual> parents,
                                         std::vector<Individual> offspring, int p);

} // namespace detail

} // namespace optbench
