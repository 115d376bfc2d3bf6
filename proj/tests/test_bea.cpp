#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "optbench/bea.hpp"
#include "optbench/bench.hpp"

using namespace optbench;

namespace {

class ZeroNormalSource final : public RandomSource {
public:
    explicit ZeroNormalSource(std::uint64_t seed) : inner_(seed) {}
    double uniform01() override { return inner_.uniform01(); }
    double normal01() override { return 0.0; }

private:
    Mt19937Source inner_;
};

double cluster_sse(const std::vector<Solution>& pts, const std::vector<int>& assign, int k)
{
    const std::size_t d = pts[0].size();
    std::vector<Solution> centroid(static_cast<std::size_t>(k), Solution(d, 0.0));
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ++count[static_cast<std::size_t>(assign[i])];
        for (std::size_t j = 0; j < d; ++j)
            centroid[static_cast<std::size_t>(assign[i])][j] += pts[i][j];
    }
    for (int c = 0; c < k; ++c) {
        if (count[static_cast<std::size_t>(c)] == 0)
            return std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < d; ++j)
            centroid[static_cast<std::size_t>(c)][j] /= count[static_cast<std::size_t>(c)];
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = pts[i][j] - centroid[static_cast<std::size_t>(assign[i])][j];
            sse += diff * diff;
        }
    return sse;
}

// exhaustive search over all k^n assignments
double best_partition_sse(const std::vector<Solution>& pts, int k)
{
    const int n = static_cast<int>(pts.size());
    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    double best = std::numeric_limits<double>::infinity();
    const long total = static_cast<long>(std::pow(k, n));
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (int i = 0; i < n; ++i) {
            assign[static_cast<std::size_t>(i)] = static_cast<int>(c % k);
            c /= k;
        }
        best = std::min(best, cluster_sse(pts, assign, k));
    }
    return best;
}

Trace make_archive(const std::vector<Solution>& xs, const std::vector<double>& fs)
{
    Trace t;
    t.algorithm = "bo";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        IterationRecord r;
        r.index = static_cast<int>(i) + 1;
        r.x = xs[i];
        r.f = fs[i];
        r.stage = Stage::BO;
        t.records.push_back(r);
    }
    return t;
}

} // namespace

TEST_CASE("kmeans separates two obvious groups")
{
    const std::vector<Solution> pts = {{0.0}, {0.1}, {0.2}, {10.0}, {10.1}};
    Mt19937Source rng(1);
    const auto assign = kmeans(pts, 2, rng);
    CHECK(assign[0] == assign[1]);
    CHECK(assign[1] == assign[2]);
    CHECK(assign[3] == assign[4]);
    CHECK(assign[0] != assign[3]);
    CHECK(cluster_sse(pts, assign, 2) == doctest::Approx(best_partition_sse(pts, 2)));
}

TEST_CASE("kmeans with k equal to n gives singletons")
{
    const std::vector<Solution> pts = {{0.0}, {1.0}, {2.0}, {5.0}};
    Mt19937Source rng(2);
    const auto assign = kmeans(pts, 4, rng);
    std::set<int> distinct(assign.begin(), assign.end());
    CHECK(distinct.size() == 4);
}

TEST_CASE("kmeans keeps every cluster nonempty on degenerate input")
{
    const std::vector<Solution> pts = {{1.0}, {1.0}, {1.0}, {1.0}};
    Mt19937Source rng(3);
    const auto assign = kmeans(pts, 2, rng);
    std::set<int> distinct(assign.begin(), assign.end());
    CHECK(distinct.size() == 2);
}

TEST_CASE("kmeans rejects k larger than n")
{
    Mt19937Source rng(4);
    CHECK_THROWS_AS(kmeans({{0.0}, {1.0}}, 3, rng), std::invalid_argument);
}

TEST_CASE("kmeans matches the exhaustive-partition oracle on small sets")
{
    Mt19937Source rng(5);
    // separated blobs so the global optimum is unambiguous
    const std::vector<std::pair<std::vector<Solution>, int>> cases = {
        {{{0.0, 0.0}, {0.2, 0.1}, {5.0, 5.0}, {5.1, 4.9}, {10.0, 0.0}, {10.2, 0.1}}, 3},
        {{{0.0}, {0.3}, {4.0}, {4.2}, {8.0}, {8.1}, {8.2}}, 3},
        {{{-1.0}, {-0.8}, {1.0}, {1.2}}, 2},
    };
    for (const auto& [pts, k] : cases) {
        const auto assign = kmeans(pts, k, rng);
        CHECK(cluster_sse(pts, assign, k) == doctest::Approx(best_partition_sse(pts, k)));
    }
}

TEST_CASE("transfer strategies pick the specified solutions")
{
    const SearchSpace space({-20.0}, {20.0});
    EAConfig ea;
    Mt19937Source rng(6);

    const Trace archive = make_archive({{1.0}, {2.0}, {3.0}, {4.0}}, {3, 9, 5, 7});
    const auto s2 = select_transfer_population(archive, {TransferStrategy::S2, 50}, 2, space,
                                               ea, rng);
    REQUIRE(s2.size() == 2);
    CHECK(s2[0].x == Solution{2.0}); // f = 9
    CHECK(s2[1].x == Solution{4.0}); // f = 7

    const Trace six = make_archive({{1}, {2}, {3}, {4}, {5}, {6}},
                                   {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    const auto s1 = select_transfer_population(six, {TransferStrategy::S1, 50}, 3, space, ea,
                                               rng);
    REQUIRE(s1.size() == 3);
    CHECK(s1[0].x == Solution{4.0});
    CHECK(s1[1].x == Solution{5.0});
    CHECK(s1[2].x == Solution{6.0});

    // f increasing in x: cluster bests are x=0.2 and x=10.1
    const Trace clustered = make_archive({{0.0}, {0.1}, {0.2}, {10.0}, {10.1}},
                                         {0.0, 0.1, 0.2, 10.0, 10.1});
    const auto s3 = select_transfer_population(clustered, {TransferStrategy::S3, 50}, 2, space,
                                               ea, rng);
    REQUIRE(s3.size() == 2);
    std::set<double> got = {s3[0].x[0], s3[1].x[0]};
    CHECK(got == std::set<double>{0.2, 10.1});
}

TEST_CASE("S2 ties break toward the earlier iteration")
{
    const SearchSpace space({-20.0}, {20.0});
    EAConfig ea;
    Mt19937Source rng(7);
    const Trace archive = make_archive({{1.0}, {2.0}, {3.0}, {4.0}}, {7, 5, 7, 5});
    const auto picked = select_transfer_population(archive, {TransferStrategy::S2, 50}, 3,
                                                   space, ea, rng);
    REQUIRE(picked.size() == 3);
    CHECK(picked[0].x == Solution{1.0});
    CHECK(picked[1].x == Solution{3.0});
    CHECK(picked[2].x == Solution{2.0});
}

TEST_CASE("S2 returns the p largest objective values as a multiset")
{
    const SearchSpace space(std::vector<double>(3, -50.0), std::vector<double>(3, 50.0));
    EAConfig ea;
    Mt19937Source rng(8);
    std::vector<Solution> xs;
    std::vector<double> fs;
    for (int i = 0; i < 40; ++i) {
        xs.push_back(space.sample(rng));
        fs.push_back(rng.normal(0.0, 4.0));
    }
    const Trace archive = make_archive(xs, fs);
    const auto picked = select_transfer_population(archive, {TransferStrategy::S2, 50}, 10,
                                                   space, ea, rng);

    std::multiset<double> got;
    for (const auto& ind : picked) {
        // every transferred individual is a copy of an archive solution
        CHECK(std::find(xs.begin(), xs.end(), ind.x) != xs.end());
        const auto at = std::find(xs.begin(), xs.end(), ind.x) - xs.begin();
        got.insert(fs[static_cast<std::size_t>(at)]);
    }
    std::vector<double> sorted = fs;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::multiset<double> expected(sorted.begin(), sorted.begin() + 10);
    CHECK(got == expected);
}

TEST_CASE("S4 clusters only the top half")
{
    const SearchSpace space({-20.0}, {20.0});
    EAConfig ea;
    Mt19937Source rng(9);
    // bottom half lives far away at x ~ -15; top half forms two blobs
    std::vector<Solution> xs;
    std::vector<double> fs;
    for (int i = 0; i < 10; ++i) {
        xs.push_back({-15.0 + 0.1 * i});
        fs.push_back(-100.0 - i);
    }
    for (int i = 0; i < 5; ++i) {
        xs.push_back({0.0 + 0.05 * i});
        fs.push_back(10.0 + i);
    }
    for (int i = 0; i < 5; ++i) {
        xs.push_back({10.0 + 0.05 * i});
        fs.push_back(20.0 + i);
    }
    const auto archive = make_archive(xs, fs);
    const auto picked = select_transfer_population(archive, {TransferStrategy::S4, 50}, 2,
                                                   space, ea, rng);
    REQUIRE(picked.size() == 2);
    // cluster bests of the two top-half blobs
    std::set<double> got = {picked[0].x[0], picked[1].x[0]};
    CHECK(got == std::set<double>{0.2, 10.2});

    // step sizes reflect the seeds' own spread
    const double expected_sd = std::sqrt((5.0 * 5.0 + 5.0 * 5.0) / 2.0);
    for (const auto& ind : picked)
        CHECK(ind.sigmas == std::vector<double>{expected_sd});
}

TEST_CASE("degenerate seed spread falls back to epsilon0")
{
    const SearchSpace space({-20.0}, {20.0});
    EAConfig ea;
    Mt19937Source rng(12);
    const Trace archive = make_archive({{3.0}, {3.0}, {1.0}}, {5, 5, 1});
    const auto picked = select_transfer_population(archive, {TransferStrategy::S2, 50}, 2,
                                                   space, ea, rng);
    for (const auto& ind : picked)
        CHECK(ind.sigmas == std::vector<double>{ea.epsilon0_factor * space.range(0)});
}

TEST_CASE("transfer population preconditions")
{
    const SearchSpace space({-20.0}, {20.0});
    EAConfig ea;
    Mt19937Source rng(10);
    const Trace tiny = make_archive({{1.0}, {2.0}}, {1, 2});
    CHECK_THROWS_AS(
        select_transfer_population(tiny, {TransferStrategy::S2, 50}, 3, space, ea, rng),
        std::invalid_argument);
    const Trace archive = make_archive({{1.0}, {2.0}, {3.0}, {4.0}}, {1, 2, 3, 4});
    // top 50% of 4 records is 2 < p = 3
    CHECK_THROWS_AS(
        select_transfer_population(archive, {TransferStrategy::S4, 50}, 3, space, ea, rng),
        std::invalid_argument);
}

TEST_CASE("sigma'' update follows the two-branch rule exactly")
{
    GainAwareState s;
    s = update_sigma2(s, 0.0, 1.03, 0.99);
    CHECK(s.sigma2 == 1.03);
    s.sigma2 = 1.0;
    s = update_sigma2(s, 0.5, 1.03, 0.99);
    CHECK(s.sigma2 == 0.99);

    s.sigma2 = 1.0;
    for (int i = 0; i < 20; ++i)
        s = update_sigma2(s, 0.0, 1.03, 0.99);
    CHECK(s.sigma2 == doctest::Approx(1.8061112346694148).epsilon(1e-12));

    // each step multiplies by exactly alpha or beta
    Mt19937Source rng(11);
    s.sigma2 = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double delta = rng.uniform01() < 0.5 ? 0.0 : rng.uniform01();
        const double prev = s.sigma2;
        s = update_sigma2(s, delta, 1.03, 0.99);
        if (s.sigma2 > kSigma2Min && s.sigma2 < kSigma2Max)
            CHECK((s.sigma2 == prev * 1.03 || s.sigma2 == prev * 0.99));
    }

    CHECK_THROWS_AS(update_sigma2(s, -0.1, 1.03, 0.99), std::invalid_argument);
}

TEST_CASE("sigma'' is clamped against blow-up")
{
    GainAwareState s;
    for (int i = 0; i < 1000; ++i)
        s = update_sigma2(s, 0.0, 1.03, 0.99);
    CHECK(s.sigma2 == kSigma2Max);
    for (int i = 0; i < 3000; ++i)
        s = update_sigma2(s, 1.0, 1.03, 0.99);
    CHECK(s.sigma2 == kSigma2Min);
}

TEST_CASE("gain-aware mutation with neutral sigma'' matches the standard one")
{
    const SearchSpace space(std::vector<double>(6, -8.0), std::vector<double>(6, 8.0));
    EAConfig cfg;
    const auto ind = make_individual(Solution(6, 0.5), space, cfg);
    ZeroNormalSource stub_a(21), stub_b(21);
    const auto standard = self_adaptive_mutate(ind, space, cfg, stub_a);
    const auto aware = gain_aware_mutate(ind, GainAwareState{1.0}, space, cfg, stub_b);
    CHECK(standard.x == aware.x);
    CHECK(standard.sigmas == aware.sigmas);
}

TEST_CASE("gain-aware mutation lands strictly inside the domain")
{
    const SearchSpace space({0.0, 0.0}, {1.0, 1.0});
    EAConfig cfg;
    Mt19937Source rng(22);
    GainAwareState state{1.0};
    int violations = 0;
    for (int t = 0; t < 100000; ++t) {
        Individual ind;
        // start on or near the boundary with a large step size
        ind.x = {rng.uniform01() < 0.5 ? 0.0 : 1.0, rng.uniform01()};
        ind.sigmas = {2.0, 2.0};
        state.sigma2 = (t % 2 == 0) ? 1.0 : 100.0;
        const auto out = gain_aware_mutate(ind, state, space, cfg, rng);
        for (int j = 0; j < 2; ++j)
            if (!(out.x[static_cast<std::size_t>(j)] > 0.0 &&
                  out.x[static_cast<std::size_t>(j)] < 1.0))
                ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("sigma'' scales the mutation spread")
{
    const int d = 10;
    const SearchSpace space(std::vector<double>(d, -100.0), std::vector<double>(d, 100.0));
    EAConfig cfg;
    Individual center;
    center.x = Solution(d, 0.0);
    center.sigmas = std::vector<double>(d, 0.5); // tiny against the domain

    auto spread = [&](double sigma2, std::uint64_t seed) {
        Mt19937Source rng(seed);
        const GainAwareState state{sigma2};
        double sum_sq = 0.0;
        const int trials = 100000;
        for (int t = 0; t < trials; ++t) {
            const auto out = gain_aware_mutate(center, state, space, cfg, rng);
            for (int j = 0; j < d; ++j) {
                const double dx = out.x[static_cast<std::size_t>(j)];
                sum_sq += dx * dx;
            }
        }
        return std::sqrt(sum_sq / (static_cast<double>(trials) * d));
    };

    const double ratio = spread(2.0, 31) / spread(1.0, 31);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("run_bea stages, determinism and sigma'' bookkeeping")
{
    const SearchSpace space(std::vector<double>(2, -4.0), std::vector<double>(2, 4.0));
    const Objective constant = [](const Solution&) { return 1.0; };

    BEAConfig cfg;
    cfg.seed = 77;
    cfg.switch_point = 12;
    cfg.ea.pop_size = 4;
    cfg.bo.acq_samples = 30;
    cfg.bo.acq_refine_steps = 5;

    GainAwareState final_state;
    const Trace t = run_bea(constant, space, cfg, 16, &final_state);
    REQUIRE(t.size() == 16);
    CHECK(t.algorithm == "bea");
    for (int i = 1; i <= 12; ++i)
        CHECK(t.at(i).stage == Stage::BO);
    for (int i = 13; i <= 16; ++i)
        CHECK(t.at(i).stage == Stage::EA);

    // constant objective: every windowed gain is zero, one update per
    // EA-stage evaluation
    CHECK(final_state.sigma2 == doctest::Approx(std::pow(1.03, 4)).epsilon(1e-12));

    // the BO stage replays run_bo exactly under the same seed
    BOConfig bo_cfg = cfg.bo;
    bo_cfg.seed = cfg.seed;
    const Trace pure_bo = run_bo(constant, space, bo_cfg, 12);
    for (int i = 1; i <= 12; ++i)
        CHECK(t.at(i).x == pure_bo.at(i).x);
}

TEST_CASE("run_bea improves on rastrigin and respects bounds")
{
    const BenchmarkFunction fn{BenchmarkId::Rastrigin, 5};
    const auto space = domain(fn);
    const Objective obj = [&](const Solution& x) { return -evaluate(fn, x); };
    BEAConfig cfg;
    cfg.seed = 5;
    cfg.switch_point = 30;
    cfg.bo.acq_samples = 100;
    cfg.bo.acq_refine_steps = 10;
    const Trace t = run_bea(obj, space, cfg, 90);
    REQUIRE(t.size() == 90);
    for (const auto& r : t.records)
        CHECK(space.contains(r.x));
    CHECK(best_so_far(t, 90) >= best_so_far(t, 30));

    CHECK_THROWS_AS(run_bea(obj, space, cfg, 30), std::invalid_argument);
    BEAConfig bad = cfg;
    bad.alpha = 0.9;
    CHECK_THROWS_AS(run_bea(obj, space, bad, 90), std::invalid_argument);
}
