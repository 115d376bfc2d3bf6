#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "optbench/harness.hpp"

using namespace optbench;
namespace fs = std::filesystem;

namespace {

GainSeries make_series(const std::vector<double>& effs, int first_iter = 11, int window = 10)
{
    GainSeries s;
    s.window = window;
    for (std::size_t i = 0; i < effs.size(); ++i) {
        GainEntry e;
        e.iteration = first_iter + static_cast<int>(i);
        e.gain = effs[i];
        e.cost = 1.0;
        e.efficiency = effs[i];
        s.entries.push_back(e);
    }
    return s;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Drops the measured wall-clock column (overhead_s in trace CSVs,
// total_comp_time_s in the summary); everything else must replay
// byte-identically.
std::string strip_timing(const std::string& csv)
{
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    bool summary = false;
    if (std::getline(in, line)) {
        summary = line.starts_with("function,");
        out << line << '\n';
    }
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string field;
        int col = 0;
        const int drop = summary ? 5 : 3;
        bool first = true;
        while (std::getline(row, field, ',')) {
            if (col++ == drop)
                continue;
            out << (first ? "" : ",") << field;
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

// minimal well-formedness check: tags balance and nest properly
bool xml_well_formed(const std::string& s)
{
    std::vector<std::string> stack;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '<') {
            ++i;
            continue;
        }
        const auto end = s.find('>', i);
        if (end == std::string::npos)
            return false;
        std::string tag = s.substr(i + 1, end - i - 1);
        i = end + 1;
        if (tag.starts_with("?") || tag.starts_with("!"))
            continue;
        if (tag.starts_with("/")) {
            if (stack.empty())
                return false;
            const std::string name = tag.substr(1);
            if (stack.back() != name)
                return false;
            stack.pop_back();
        } else if (!tag.ends_with("/")) {
            const auto space = tag.find_first_of(" \t\n");
            stack.push_back(space == std::string::npos ? tag : tag.substr(0, space));
        }
    }
    return stack.empty();
}

ExperimentSpec tiny_spec()
{
    ExperimentSpec spec;
    spec.functions = {{BenchmarkId::Rastrigin, 3}};
    spec.algorithms = {default_algorithm(AlgorithmKind::EA)};
    spec.eval_times = {1.0};
    spec.iters = 40;
    spec.repetitions = 3;
    spec.base_seed = 100;
    return spec;
}

} // namespace

TEST_CASE("mann-whitney exact values")
{
    const std::vector<double> same = {1, 2, 3};
    const auto tie = mann_whitney_greater(same, same);
    CHECK(tie.p == 0.5);
    CHECK(tie.ties);

    const std::vector<double> a = {10, 11, 12, 13, 14};
    const std::vector<double> b = {1, 2, 3, 4, 5};
    const auto r = mann_whitney_greater(a, b);
    CHECK(r.exact);
    CHECK(r.p == doctest::Approx(1.0 / 252.0).epsilon(1e-12));

    const std::vector<double> all_equal = {2, 2};
    const auto deg = mann_whitney_greater(all_equal, all_equal);
    CHECK(deg.p == 0.5);
    CHECK(deg.ties);
}

TEST_CASE("mann-whitney agrees with a permutation oracle")
{
    Mt19937Source rng(3);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> a(5), b(5);
        for (auto& v : a)
            v = rng.normal01();
        for (auto& v : b)
            v = rng.normal01() - 0.5;

        // enumerate all C(10,5) group assignments of the pooled sample
        std::vector<double> pool = a;
        pool.insert(pool.end(), b.begin(), b.end());
        double u_obs = 0.0;
        for (double x : a)
            for (double y : b)
                u_obs += x > y ? 1.0 : 0.0;
        int total = 0, tail = 0, point = 0;
        std::vector<int> pick(10, 0);
        std::fill(pick.begin(), pick.begin() + 5, 1);
        std::sort(pick.begin(), pick.end());
        do {
            std::vector<double> ga, gb;
            for (int i = 0; i < 10; ++i)
                (pick[static_cast<std::size_t>(i)] ? ga : gb)
                    .push_back(pool[static_cast<std::size_t>(i)]);
            double u = 0.0;
            for (double x : ga)
                for (double y : gb)
                    u += x > y ? 1.0 : 0.0;
            ++total;
            if (u >= u_obs)
                ++tail;
            if (u == u_obs)
                ++point;
        } while (std::next_permutation(pick.begin(), pick.end()));

        const auto r = mann_whitney_greater(a, b);
        CHECK(r.exact);
        CHECK(r.p == doctest::Approx(static_cast<double>(tail) / total).epsilon(1e-12));

        // swapping the samples complements the p-value up to the point mass
        const auto rswap = mann_whitney_greater(b, a);
        CHECK(r.p + rswap.p ==
              doctest::Approx(1.0 + static_cast<double>(point) / total).epsilon(1e-12));
    }
}

TEST_CASE("mann-whitney normal approximation for large samples")
{
    std::vector<double> a, b;
    for (int i = 0; i < 30; ++i) {
        a.push_back(10.0 + i);
        b.push_back(0.0 + i);
    }
    const auto r = mann_whitney_greater(a, b);
    CHECK_FALSE(r.exact);
    CHECK(r.p < 0.001);
    const auto rev = mann_whitney_greater(b, a);
    CHECK(rev.p > 0.99);
}

TEST_CASE("switch point detection on a constructed crossover")
{
    const auto bo = make_series({5, 4, 1, 0.5, 0.2});
    const auto ea = make_series({2, 2, 2, 2, 2});
    const auto sp = detect_switch_point(bo, ea, 2);
    REQUIRE(sp.has_value());
    CHECK(*sp == 13); // third entry

    const auto never = make_series({9, 9, 9, 9, 9});
    CHECK_FALSE(detect_switch_point(never, ea, 2).has_value());

    auto mismatched = ea;
    mismatched.entries.pop_back();
    CHECK_THROWS_AS(detect_switch_point(bo, mismatched, 2), std::invalid_argument);
    auto other_window = ea;
    other_window.window = 5;
    CHECK_THROWS_AS(detect_switch_point(bo, other_window, 2), std::invalid_argument);
}

TEST_CASE("persistence filters one-off spikes")
{
    const auto bo = make_series({5, 1, 5, 1, 1, 1});
    const auto ea = make_series({2, 2, 2, 2, 2, 2});
    CHECK(*detect_switch_point(bo, ea, 1) == 12);
    CHECK(*detect_switch_point(bo, ea, 3) == 14);
}

TEST_CASE("average_gain_series is the entrywise mean")
{
    const auto s1 = make_series({1, 2, 3});
    const auto s2 = make_series({3, 4, 5});
    const auto avg = average_gain_series({&s1, &s2});
    REQUIRE(avg.entries.size() == 3);
    CHECK(avg.entries[0].efficiency == 2.0);
    CHECK(avg.entries[2].efficiency == 4.0);
    CHECK(avg.entries[1].iteration == 12);
}

TEST_CASE("run_experiment produces one result per run and eval time")
{
    auto spec = tiny_spec();
    const auto results = run_experiment(spec);
    REQUIRE(results.size() == 3);
    for (const auto& r : results) {
        CHECK(r.error.empty());
        CHECK(r.trace.size() == 40);
        CHECK(r.best_curve.size() == 40);
        CHECK(r.times.size() == 40);
        CHECK(r.gains.entries.size() == 30);
        CHECK(r.eval_time == 1.0);
    }
    CHECK(results[0].seed == 100);
    CHECK(results[1].seed == 101);
    CHECK(results[2].seed == 102);

    spec.eval_times = {0.1, 1.0, 10.0};
    const auto more = run_experiment(spec);
    CHECK(more.size() == 9);

    ExperimentSpec bad = tiny_spec();
    bad.repetitions = 0;
    CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
}

TEST_CASE("derived series are recomputable from the trace")
{
    const auto results = run_experiment(tiny_spec());
    for (const auto& r : results) {
        const auto ts = timestamps(r.trace, r.eval_time);
        CHECK(ts == r.times);
        const auto curve = best_so_far_curve(r.trace);
        CHECK(curve == r.best_curve);
        const auto gains = gain_series(r.trace, 10, r.eval_time);
        REQUIRE(gains.entries.size() == r.gains.entries.size());
        for (std::size_t i = 0; i < gains.entries.size(); ++i)
            CHECK(gains.entries[i].efficiency == r.gains.entries[i].efficiency);
    }
}

TEST_CASE("export and reload round-trip")
{
    const auto dir = fs::temp_directory_path() / "optbench_harness_rt";
    fs::remove_all(dir);
    const auto results = run_experiment(tiny_spec());
    export_csv(results, dir.string());

    CHECK(fs::exists(dir / "summary.csv"));
    int trace_files = 0;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().filename() != "summary.csv")
            ++trace_files;
    CHECK(trace_files == 3);

    const auto rows = read_summary_csv((dir / "summary.csv").string());
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].function == "rastrigin");
        CHECK(rows[i].algorithm == "ea");
        CHECK(rows[i].final_best ==
              doctest::Approx(results[i].best_curve.back()).epsilon(1e-8));
        CHECK(rows[i].total_comp_time_s ==
              doctest::Approx(results[i].times.back()).epsilon(1e-8));
        CHECK_FALSE(rows[i].switch_point.has_value());
    }

    const auto loaded = load_results(dir.string());
    REQUIRE(loaded.size() == 3);
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].trace.size() == results[i].trace.size());
        CHECK(loaded[i].best_curve.back() ==
              doctest::Approx(results[i].best_curve.back()).epsilon(1e-8));
    }
    fs::remove_all(dir);
}

TEST_CASE("export with no results writes only the header")
{
    const auto dir = fs::temp_directory_path() / "optbench_harness_empty";
    fs::remove_all(dir);
    export_csv({}, dir.string());
    CHECK(slurp(dir / "summary.csv") ==
          "function,algorithm,te,seed,final_best,total_comp_time_s,switch_point\n");
    fs::remove_all(dir);
}

TEST_CASE("identical invocations replay identically apart from wall-clock columns")
{
    const auto dir_a = fs::temp_directory_path() / "optbench_repro_a";
    const auto dir_b = fs::temp_directory_path() / "optbench_repro_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    export_csv(run_experiment(tiny_spec()), dir_a.string());
    auto second = tiny_spec();
    second.workers = 1; // worker count must not change results either
    export_csv(run_experiment(second), dir_b.string());
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        const auto other = dir_b / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(strip_timing(slurp(entry.path())) == strip_timing(slurp(other)));
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    // exporting one computed result set twice is fully byte-identical
    const auto results = run_experiment(tiny_spec());
    export_csv(results, dir_a.string());
    export_csv(results, dir_b.string());
    for (const auto& entry : fs::directory_iterator(dir_a))
        CHECK(slurp(entry.path()) == slurp(dir_b / entry.path().filename()));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("step interpolation carries the last value forward")
{
    const std::vector<double> times = {1.0, 2.0, 4.0};
    const std::vector<double> values = {5.0, 7.0, 8.0};
    CHECK(std::isnan(step_interpolate(times, values, 0.5)));
    CHECK(step_interpolate(times, values, 1.0) == 5.0);
    CHECK(step_interpolate(times, values, 3.9) == 7.0);
    CHECK(step_interpolate(times, values, 100.0) == 8.0);
}

TEST_CASE("plots are well-formed SVG with one legend entry per algorithm")
{
    auto spec = tiny_spec();
    spec.algorithms = {default_algorithm(AlgorithmKind::EA)};
    spec.repetitions = 1;
    auto one = run_experiment(spec);

    const auto dir = fs::temp_directory_path() / "optbench_svg";
    fs::create_directories(dir);
    const auto single = (dir / "single.svg").string();
    render_plot(one, PlotKind::ObjectiveVsTime, single);
    const std::string svg = slurp(single);
    CHECK(svg.starts_with("<svg"));
    CHECK(xml_well_formed(svg));
    CHECK(svg.find(">ea</text>") != std::string::npos);

    // three algorithm labels -> three legend entries
    auto multi = one;
    for (const char* name : {"algo2", "algo3"}) {
        auto copy = one.front();
        copy.algorithm = name;
        multi.push_back(copy);
    }
    const auto multi_path = (dir / "multi.svg").string();
    render_plot(multi, PlotKind::GainVsIter, multi_path);
    const std::string msvg = slurp(multi_path);
    CHECK(xml_well_formed(msvg));
    CHECK(msvg.find(">ea</text>") != std::string::npos);
    CHECK(msvg.find(">algo2</text>") != std::string::npos);
    CHECK(msvg.find(">algo3</text>") != std::string::npos);

    // mixed functions are rejected
    auto mixed = one;
    auto other = one.front();
    other.function = "griewank";
    mixed.push_back(other);
    CHECK_THROWS_AS(render_plot(mixed, PlotKind::ObjectiveVsTime, (dir / "x.svg").string()),
                    std::invalid_argument);
    CHECK_THROWS_AS(render_plot({}, PlotKind::ObjectiveVsTime, (dir / "y.svg").string()),
                    std::invalid_argument);

    render_plot(one, PlotKind::OverheadVsIter, (dir / "overhead.svg").string());
    CHECK(xml_well_formed(slurp(dir / "overhead.svg")));
    fs::remove_all(dir);
}
