#include "optbench/bea.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace optbench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double sq_dist(const Solution& a, const Solution& b)
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

} // namespace

std::vector<int> kmeans(const std::vector<Solution>& points, int k, RandomSource& rng,
                        int max_iters)
{
    const int n = static_cast<int>(points.size());
    if (k < 1 || k > n)
        throw std::invalid_argument("kmeans: need 1 <= k <= number of points");
    const std::size_t d = points[0].size();

    // k-means++ seeding
    std::vector<Solution> centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(points[rng.below(static_cast<std::size_t>(n))]);
    std::vector<double> dist2(static_cast<std::size_t>(n));
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers)
                best = std::min(best, sq_dist(points[static_cast<std::size_t>(i)], c));
            dist2[static_cast<std::size_t>(i)] = best;
            total += best;
        }
        if (total == 0.0) {
            // all remaining points coincide with a center; pick uniformly
            centers.push_back(points[rng.below(static_cast<std::size_t>(n))]);
            continue;
        }
        double ticket = rng.uniform01() * total;
        int chosen = n - 1;
        for (int i = 0; i < n; ++i) {
            ticket -= dist2[static_cast<std::size_t>(i)];
            if (ticket <= 0.0) {
                chosen = i;
                break;
            }
        }
        centers.push_back(points[static_cast<std::size_t>(chosen)]);
    }

    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best_c = 0;
            double best_d = sq_dist(points[static_cast<std::size_t>(i)], centers[0]);
            for (int c = 1; c < k; ++c) {
                const double dd = sq_dist(points[static_cast<std::size_t>(i)],
                                          centers[static_cast<std::size_t>(c)]);
                if (dd < best_d) {
                    best_d = dd;
                    best_c = c;
                }
            }
            if (assign[static_cast<std::size_t>(i)] != best_c) {
                assign[static_cast<std::size_t>(i)] = best_c;
                changed = true;
            }
        }

        std::vector<int> count(static_cast<std::size_t>(k), 0);
        std::vector<Solution> sums(static_cast<std::size_t>(k), Solution(d, 0.0));
        for (int i = 0; i < n; ++i) {
            const int c = assign[static_cast<std::size_t>(i)];
            ++count[static_cast<std::size_t>(c)];
            for (std::size_t j = 0; j < d; ++j)
                sums[static_cast<std::size_t>(c)][j] += points[static_cast<std::size_t>(i)][j];
        }
        for (int c = 0; c < k; ++c) {
            if (count[static_cast<std::size_t>(c)] == 0) {
                // re-seed to the point farthest from its current center
                int far_i = 0;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i) {
                    const double dd =
                        sq_dist(points[static_cast<std::size_t>(i)],
                                centers[static_cast<std::size_t>(
                                    assign[static_cast<std::size_t>(i)])]);
                    if (dd > far_d) {
                        far_d = dd;
                        far_i = i;
                    }
                }
                centers[static_cast<std::size_t>(c)] = points[static_cast<std::size_t>(far_i)];
                assign[static_cast<std::size_t>(far_i)] = c;
                changed = true;
            } else {
                for (std::size_t j = 0; j < d; ++j)
                    centers[static_cast<std::size_t>(c)][j] =
                        sums[static_cast<std::size_t>(c)][j] / count[static_cast<std::size_t>(c)];
            }
        }
        if (!changed && iter > 0)
            break;
    }
    return assign;
}

std::vector<Individual> select_transfer_population(const Trace& archive,
                                                   const TransferConfig& transfer, int p,
                                                   const SearchSpace& space,
                                                   const EAConfig& ea_cfg, RandomSource& rng)
{
    const int n = archive.size();
    if (n < p)
        throw std::invalid_argument("select_transfer_population: archive smaller than p");
    if (!(transfer.top_percent > 0.0 && transfer.top_percent <= 100.0))
        throw std::invalid_argument("select_transfer_population: top_percent must be in (0,100]");

    // indices sorted best-first; ties keep the earlier iteration
    std::vector<int> by_value(static_cast<std::size_t>(n));
    std::iota(by_value.begin(), by_value.end(), 0);
    std::stable_sort(by_value.begin(), by_value.end(), [&](int a, int b) {
        return archive.records[static_cast<std::size_t>(a)].f >
               archive.records[static_cast<std::size_t>(b)].f;
    });

    std::vector<int> chosen;
    chosen.reserve(static_cast<std::size_t>(p));
    switch (transfer.strategy) {
    case TransferStrategy::S1:
        for (int i = n - p; i < n; ++i)
            chosen.push_back(i);
        break;
    case TransferStrategy::S2:
        chosen.assign(by_value.begin(), by_value.begin() + p);
        break;
    case TransferStrategy::S3:
    case TransferStrategy::S4: {
        std::vector<int> pool;
        if (transfer.strategy == TransferStrategy::S3) {
            pool.resize(static_cast<std::size_t>(n));
            std::iota(pool.begin(), pool.end(), 0);
        } else {
            const int top = static_cast<int>(std::floor(n * transfer.top_percent / 100.0));
            if (top < p)
                throw std::invalid_argument(
                    "select_transfer_population: top d% of archive smaller than p");
            pool.assign(by_value.begin(), by_value.begin() + top);
            std::sort(pool.begin(), pool.end()); // restore iteration order
        }
        std::vector<Solution> pts;
        pts.reserve(pool.size());
        for (int i : pool)
            pts.push_back(archive.records[static_cast<std::size_t>(i)].x);
        const auto assign = kmeans(pts, p, rng);
        std::vector<int> best_of_cluster(static_cast<std::size_t>(p), -1);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const int c = assign[i];
            int& cur = best_of_cluster[static_cast<std::size_t>(c)];
            if (cur < 0 || archive.records[static_cast<std::size_t>(pool[i])].f >
                               archive.records[static_cast<std::size_t>(cur)].f)
                cur = pool[i];
        }
        for (int i : best_of_cluster)
            chosen.push_back(i);
        break;
    }
    }

    // Step sizes start at the transferred set's own per-coordinate spread:
    // range-scaled defaults dwarf a converged archive's basin, and under
    // elitism oversized steps can never adapt back down (no offspring
    // survives to carry a smaller sigma).
    const int d = space.dims();
    std::vector<double> sigmas(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        double m = 0.0, ss = 0.0;
        for (int i : chosen)
            m += archive.records[static_cast<std::size_t>(i)].x[static_cast<std::size_t>(j)];
        m /= static_cast<double>(chosen.size());
        for (int i : chosen) {
            const double dx =
                archive.records[static_cast<std::size_t>(i)].x[static_cast<std::size_t>(j)] - m;
            ss += dx * dx;
        }
        const double sd = std::sqrt(ss / static_cast<double>(chosen.size()));
        sigmas[static_cast<std::size_t>(j)] =
            std::max(sd, ea_cfg.epsilon0_factor * space.range(j));
    }

    std::vector<Individual> seeds;
    seeds.reserve(chosen.size());
    for (int i : chosen) {
        Individual ind;
        ind.x = archive.records[static_cast<std::size_t>(i)].x;
        ind.sigmas = sigmas;
        seeds.push_back(std::move(ind));
    }
    return seeds;
}

GainAwareState update_sigma2(GainAwareState state, double delta_window, double alpha,
                             double beta)
{
    if (delta_window < 0.0)
        throw std::invalid_argument("update_sigma2: windowed gain must be >= 0");
    state.sigma2 *= (delta_window == 0.0) ? alpha : beta;
    state.sigma2 = std::min(std::max(state.sigma2, kSigma2Min), kSigma2Max);
    return state;
}

Individual gain_aware_mutate(const Individual& ind, const GainAwareState& state,
                             const SearchSpace& space, const EAConfig& cfg,
                             RandomSource& rng)
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

        double moved = ind.x[static_cast<std::size_t>(j)] + sigma * rng.normal01() * state.sigma2;
        // resample at the boundary instead of clamping, so boundary values
        // are not evaluated repeatedly
        int retries = 0;
        while ((moved <= space.lower(j) || moved >= space.upper(j)) && retries < 100) {
            const double center = moved <= space.lower(j) ? space.lower(j) : space.upper(j);
            moved = rng.normal(center, sigma);
            ++retries;
        }
        if (moved <= space.lower(j) || moved >= space.upper(j))
            moved = std::min(std::max(moved, space.lower(j) + eps0), space.upper(j) - eps0);
        out.x[static_cast<std::size_t>(j)] = moved;
    }
    return out;
}

Trace run_bea(const Objective& objective, const SearchSpace& space, const BEAConfig& cfg,
              int iters, GainAwareState* final_state)
{
    if (cfg.switch_point < cfg.bo.n_init)
        throw std::invalid_argument("run_bea: switch_point must be >= bo.n_init");
    if (iters <= cfg.switch_point)
        throw std::invalid_argument("run_bea: iters must exceed switch_point");
    if (!(cfg.alpha > 1.0) || !(cfg.beta < 1.0) || !(cfg.beta > 0.0))
        throw std::invalid_argument("run_bea: require alpha > 1 and 0 < beta < 1");

    Trace trace;
    trace.seed = cfg.seed;
    trace.algorithm = "bea";
    Mt19937Source rng(cfg.seed);

    // stage 1: Bayesian optimization
    run_bo_into(trace, objective, space, cfg.bo, cfg.switch_point, rng);

    // stage 2: knowledge transfer
    const int p = cfg.ea.pop_size;
    auto transfer_t0 = Clock::now();
    std::vector<Individual> pop =
        select_transfer_population(trace, cfg.transfer, p, space, cfg.ea, rng);
    double selection_carry = seconds_since(transfer_t0);

    // stage 3: gain-aware EA
    GainAwareState state;
    std::vector<double> best_curve = best_so_far_curve(trace);

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
        best_curve.push_back(std::max(best_curve.back(), f));
    };

    const auto mutate = [&](const Individual& ind, RandomSource& r) {
        return gain_aware_mutate(ind, state, space, cfg.ea, r);
    };

    // one sigma'' update per EA-stage evaluation, from the trailing
    // window-w gain of the combined trace
    const auto advance_state = [&] {
        const int i_last = trace.size();
        const int k = i_last - cfg.window;
        if (k >= 1) {
            const double delta = best_curve[static_cast<std::size_t>(i_last - 1)] -
                                 best_curve[static_cast<std::size_t>(k - 1)];
            state = update_sigma2(state, delta, cfg.alpha, cfg.beta);
        }
    };

    // The transferred seeds are (re)evaluated as the first EA records.
    {
        const int m = std::min(p, iters - trace.size());
        std::vector<Individual> evaluated;
        evaluated.reserve(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const auto t0 = Clock::now();
            advance_state();
            Individual ind = std::move(pop[static_cast<std::size_t>(i)]);
            const double overhead = seconds_since(t0) + selection_carry / m;
            evaluate(ind, overhead);
            evaluated.push_back(std::move(ind));
        }
        pop = std::move(evaluated);
        selection_carry = 0.0;
    }

    while (trace.size() < iters) {
        const int m = std::min(p, iters - trace.size());
        std::vector<Individual> offspring;
        offspring.reserve(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) {
            const auto t0 = Clock::now();
            advance_state();
            Individual child = detail::make_offspring(pop, cfg.ea, rng, mutate);
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
    if (final_state)
        *final_state = state;
    return trace;
}

} // namespace optbench
