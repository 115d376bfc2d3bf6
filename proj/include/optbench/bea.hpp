#pragma once

#include <vector>

#include "optbench/bo.hpp"
#include "optbench/core.hpp"
#include "optbench/ea.hpp"

namespace optbench {

// Rule for seeding the EA population from the BO archive.
enum class TransferStrategy { S1, S2, S3, S4 };

struct TransferConfig {
    TransferStrategy strategy = TransferStrategy::S4;
    double top_percent = 50.0; // S4: cluster within the top d% of solutions
};

struct BEAConfig {
    BOConfig bo;
    EAConfig ea{.crossover_rate = 0.1};
    int switch_point = 250; // evaluations spent in the BO stage
    double alpha = 1.03;    // step-scale growth on zero-gain windows
    double beta = 0.99;     // step-scale decay otherwise
    int window = 10;
    TransferConfig transfer;
    std::uint64_t seed = 0; // run_bea uses this seed; bo.seed/ea.seed are ignored
};

// Global mutation scale sigma'' of the gain-aware EA.
struct GainAwareState {
    double sigma2 = 1.0;
};

inline constexpr double kSigma2Min = 1e-3;
inline constexpr double kSigma2Max = 1e3;

// Lloyd's algorithm with k-means++ seeding; re-seeds empty clusters to the
// farthest point. Returns one cluster id per point.
std::vector<int> kmeans(const std::vector<Solution>& points, int k, RandomSource& rng,
                        int max_iters = 100);

// S1: last p evaluated solutions. S2: top p by objective. S3: best of each
// of p k-means clusters over all solutions. S4: as S3 within the top d%.
// Ties break toward the earlier iteration. BO solutions carry no step
// sizes, so seeds start at the transferred set's per-coordinate standard
// deviation, floored at epsilon0.
std::vector<Individual> select_transfer_population(const Trace& archive,
                                                   const TransferConfig& transfer, int p,
                                                   const SearchSpace& space,
                                                   const EAConfig& ea_cfg, RandomSource& rng);

// sigma'' grows by alpha when the windowed gain is zero and shrinks by
// beta otherwise, clamped to [kSigma2Min, kSigma2Max].
GainAwareState update_sigma2(GainAwareState state, double delta_window, double alpha,
                             double beta);

// Self-adaptive mutation with the perturbation scaled by sigma''.
// Out-of-bound coordinates are resampled from a normal centered on the
// violated bound until they fall strictly inside (capped retries, then a
// clamp nudged inward by epsilon0).
Individual gain_aware_mutate(const Individual& ind, const GainAwareState& state,
                             const SearchSpace& space, const EAConfig& cfg,
                             RandomSource& rng);

// Three-stage hybrid: BO for switch_point evaluations, knowledge transfer,
// then the gain-aware EA for the remainder. Records carry their stage tag.
// final_state, when given, receives sigma'' as of the last evaluation.
Trace run_bea(const Objective& objective, const SearchSpace& space, const BEAConfig& cfg,
              int iters, GainAwareState* final_state = nullptr);

} // namespace optbench
