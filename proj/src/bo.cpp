#include "optbench/bo.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace optbench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::VectorXd to_eigen(const Solution& x)
{
    return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

} // namespace

double ucb_scale(int t, int dims, double gamma, double nu)
{
    if (t < 1)
        throw std::invalid_argument("ucb: iteration count must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("ucb: gamma must lie in (0,1)");
    const double log_term = (dims / 2.0 + 2.0) * std::log(static_cast<double>(t)) +
                            std::log(std::numbers::pi * std::numbers::pi / (3.0 * gamma));
    const double tau = 2.0 * log_term;
    if (!(tau > 0.0))
        throw std::invalid_argument("ucb: nonpositive tau_t");
    return std::sqrt(nu * tau);
}

double ucb(double mu, double sigma, int t, int dims, double gamma, double nu)
{
    if (sigma < 0.0)
        throw std::invalid_argument("ucb: sigma must be >= 0");
    return mu + ucb_scale(t, dims, gamma, nu) * sigma;
}

Eigen::MatrixXd acquisition_candidates(const GPModel& model, const BOConfig& cfg,
                                       RandomSource& rng)
{
    const int d = model.dims();
    const int n_local = cfg.acq_samples / 2;
    const int n_uniform = cfg.acq_samples - n_local;

    Eigen::MatrixXd candidates(cfg.acq_samples, d);
    for (int i = 0; i < n_uniform; ++i)
        for (int j = 0; j < d; ++j)
            candidates(i, j) = rng.uniform01();

    Eigen::Index best_row = 0;
    model.targets().maxCoeff(&best_row);
    const Eigen::VectorXd incumbent = model.inputs().row(best_row).transpose();
    for (int i = 0; i < n_local; ++i) {
        const double sd = (i % 2 == 0) ? model.params().theta : model.params().theta / 5.0;
        for (int j = 0; j < d; ++j)
            candidates(n_uniform + i, j) =
                std::min(1.0, std::max(0.0, incumbent(j) + sd * rng.normal01()));
    }
    return candidates;
}

Solution propose(const GPModel& model, const SearchSpace& space, const BOConfig& cfg, int t,
                 RandomSource& rng)
{
    const int d = model.dims();
    const double scale = ucb_scale(t, d, cfg.gamma, cfg.nu);

    const Eigen::MatrixXd candidates = acquisition_candidates(model, cfg, rng);

    Eigen::VectorXd mean, var;
    model.posterior_batch(candidates, mean, var);
    const Eigen::VectorXd score = mean + scale * var.cwiseSqrt();

    Eigen::Index best_row = 0;
    score.maxCoeff(&best_row);
    Eigen::VectorXd best = candidates.row(best_row).transpose();
    double best_score = score(best_row);

    double step = 0.05;
    int failures = 0;
    Eigen::VectorXd trial(d);
    for (int s = 0; s < cfg.acq_refine_steps; ++s) {
        for (int j = 0; j < d; ++j)
            trial(j) = std::min(1.0, std::max(0.0, best(j) + step * rng.normal01()));
        const auto p = model.posterior(trial);
        const double trial_score = p.mean + scale * std::sqrt(p.var);
        if (trial_score > best_score) {
            best = trial;
            best_score = trial_score;
            failures = 0;
        } else if (++failures == 10) {
            step *= 0.5;
            failures = 0;
        }
    }

    Solution u(best.data(), best.data() + d);
    return space.denormalize(u);
}

void run_bo_into(Trace& trace, const Objective& objective, const SearchSpace& space,
                 const BOConfig& cfg, int iters, RandomSource& rng)
{
    const int d = space.dims();
    const int start = trace.size();

    auto evaluate_and_record = [&](Solution x, double overhead) {
        double f;
        try {
            f = objective(x);
        } catch (const std::exception& e) {
            throw std::runtime_error("objective failed at iteration " +
                                     std::to_string(trace.size() + 1) + ": " + e.what());
        }
        IterationRecord rec;
        rec.index = trace.size() + 1;
        rec.x = std::move(x);
        rec.f = f;
        rec.overhead_s = overhead;
        rec.stage = Stage::BO;
        trace.records.push_back(std::move(rec));
    };

    for (int i = start; i < start + iters; ++i) {
        const auto t0 = Clock::now();
        Solution x;
        if (i < cfg.n_init) {
            x = space.sample(rng);
        } else {
            Eigen::MatrixXd X(i, d);
            Eigen::VectorXd f(i);
            for (int r = 0; r < i; ++r) {
                const Solution u = space.normalize(trace.records[static_cast<std::size_t>(r)].x);
                X.row(r) = to_eigen(u).transpose();
                f(r) = trace.records[static_cast<std::size_t>(r)].f;
            }
            // standardize targets so the unit-variance prior and the UCB
            // exploration term are on the objective's scale
            const double f_mean = f.mean();
            const double f_sd = std::sqrt((f.array() - f_mean).square().sum() /
                                          static_cast<double>(i));
            f = (f.array() - f_mean) / (f_sd > 1e-12 ? f_sd : 1.0);
            const GPModel model = GPModel::fit(X, f, KernelParams{cfg.theta}, cfg.jitter);
            x = propose(model, space, cfg, i, rng);
        }
        evaluate_and_record(std::move(x), seconds_since(t0));
    }
}

Trace run_bo(const Objective& objective, const SearchSpace& space, const BOConfig& cfg,
             int iters)
{
    if (iters < cfg.n_init)
        throw std::invalid_argument("run_bo: iters must be >= n_init");
    Trace trace;
    trace.seed = cfg.seed;
    trace.algorithm = "bo";
    Mt19937Source rng(cfg.seed);
    run_bo_into(trace, objective, space, cfg, iters, rng);
    return trace;
}

} // namespace optbench
