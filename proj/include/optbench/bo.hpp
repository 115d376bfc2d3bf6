#pragma once

#include <functional>

#include "optbench/core.hpp"
#include "optbench/gp.hpp"

namespace optbench {

using Objective = std::function<double(const Solution&)>;

struct BOConfig {
    double theta = 0.1;        // GP length scale (normalized inputs)
    double gamma = 0.1;        // GP-UCB confidence parameter, in (0,1)
    double nu = 1.0;
    int n_init = 10;           // uniform samples before the first fit
    int acq_samples = 1000;    // uniform candidates per acquisition search
    int acq_refine_steps = 100;
    double jitter = 1e-6;
    std::uint64_t seed = 0;
};

// sqrt(nu * tau_t) with tau_t = 2 log(t^(d/2+2) pi^2 / (3 gamma)).
double ucb_scale(int t, int dims, double gamma, double nu);

double ucb(double mu, double sigma, int t, int dims, double gamma, double nu);

// Candidate pool for one acquisition search: uniform rows first, then
// Gaussian perturbations of the incumbent best training point at two
// scales (theta and theta/5 per coordinate, clamped to the unit cube).
// All-uniform pools leave the UCB surface flat in high dimension, where
// no random candidate ever lands within a length scale of the data.
Eigen::MatrixXd acquisition_candidates(const GPModel& model, const BOConfig& cfg,
                                       RandomSource& rng);

// Acquisition search: best UCB over acquisition_candidates, then (1+1)
// Gaussian refinement in normalized space (step 0.05, halved after 10
// consecutive rejections). Returns a denormalized point inside `space`.
Solution propose(const GPModel& model, const SearchSpace& space, const BOConfig& cfg, int t,
                 RandomSource& rng);

// Full BO run: n_init uniform samples, then fit-propose-evaluate cycles.
// Per-record overhead covers fitting and the acquisition search only.
Trace run_bo(const Objective& objective, const SearchSpace& space, const BOConfig& cfg,
             int iters);

// Appends `iters` BO iterations to `trace` using the supplied rng stream.
// run_bo and the BO stage of run_bea share this loop.
void run_bo_into(Trace& trace, const Objective& objective, const SearchSpace& space,
                 const BOConfig& cfg, int iters, RandomSource& rng);

} // namespace optbench
