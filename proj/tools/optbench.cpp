#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include "optbench/harness.hpp"

using namespace optbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct RunArgs {
    std::vector<std::string> functions = {"griewank"};
    std::vector<std::string> algos = {"bo"};
    int iters = 600;
    int reps = 10;
    std::vector<double> te = {0.1, 1.0, 10.0};
    std::uint64_t seed = 1;
    std::string out = "results";
    int workers = 0;
    // algorithm knobs
    double gamma = 0.1;
    double theta = 0.0; // 0: per-function default
    int pop = 10;
    int switch_point = 250;
    std::string strategy = "s4";
    double alpha = 1.03;
    double beta = 0.99;
    double top_percent = 50.0;
    int window = 10;
};

int do_run(const RunArgs& args)
{
    ExperimentSpec spec;
    for (const auto& name : args.functions) {
        const auto id = parse_benchmark(name);
        if (!id) {
            std::cerr << "unknown function: " << name << "\n";
            return kExitValidation;
        }
        spec.functions.push_back({*id, 20});
    }
    std::map<std::string, TransferStrategy> strategies = {
        {"s1", TransferStrategy::S1},
        {"s2", TransferStrategy::S2},
        {"s3", TransferStrategy::S3},
        {"s4", TransferStrategy::S4},
    };
    if (!strategies.count(args.strategy)) {
        std::cerr << "unknown transfer strategy: " << args.strategy << "\n";
        return kExitValidation;
    }
    for (const auto& name : args.algos) {
        const auto kind = parse_algorithm(name);
        if (!kind) {
            std::cerr << "unknown algorithm: " << name << "\n";
            return kExitValidation;
        }
        AlgorithmConfig cfg = default_algorithm(*kind);
        cfg.bo.gamma = args.gamma;
        cfg.ea.pop_size = args.pop;
        cfg.bea.bo.gamma = args.gamma;
        cfg.bea.ea.pop_size = args.pop;
        cfg.bea.switch_point = args.switch_point;
        cfg.bea.alpha = args.alpha;
        cfg.bea.beta = args.beta;
        cfg.bea.transfer.strategy = strategies[args.strategy];
        cfg.bea.transfer.top_percent = args.top_percent;
        if (args.theta > 0.0)
            cfg.theta = args.theta;
        spec.algorithms.push_back(std::move(cfg));
    }
    spec.iters = args.iters;
    spec.repetitions = args.reps;
    spec.eval_times = args.te;
    spec.base_seed = args.seed;
    spec.window = args.window;
    spec.workers = args.workers;

    const auto results = run_experiment(spec);
    export_csv(results, args.out);

    int failures = 0;
    std::set<std::string> reported;
    for (const auto& r : results) {
        if (r.error.empty())
            continue;
        const std::string key = r.function + "/" + r.algorithm + "/seed" + std::to_string(r.seed);
        if (reported.insert(key).second) {
            std::cerr << "run failed: " << key << ": " << r.error << "\n";
            ++failures;
        }
    }
    std::cout << "wrote " << args.out << "/summary.csv ("
              << results.size() - failures * spec.eval_times.size() << " results)\n";
    return failures == 0 ? kExitOk : kExitRuntime;
}

struct AnalyzeArgs {
    std::string in = "results";
    std::string plot = "objective_vs_time";
    std::string out;
    std::string function;
    double te = -1.0;
    bool logx = false;
    int window = 10;
};

int do_analyze(const AnalyzeArgs& args)
{
    std::map<std::string, PlotKind> kinds = {
        {"objective_vs_time", PlotKind::ObjectiveVsTime},
        {"gain_vs_iter", PlotKind::GainVsIter},
        {"overhead_vs_iter", PlotKind::OverheadVsIter},
    };
    if (!kinds.count(args.plot)) {
        std::cerr << "unknown plot kind: " << args.plot << "\n";
        return kExitValidation;
    }
    auto results = load_results(args.in, args.window);
    std::erase_if(results, [&](const RunResult& r) {
        if (!args.function.empty() && r.function != args.function)
            return true;
        if (args.te >= 0.0 && std::abs(r.eval_time - args.te) > 1e-12)
            return true;
        return false;
    });
    if (results.empty()) {
        std::cerr << "no matching results under " << args.in << "\n";
        return kExitValidation;
    }
    std::set<std::string> functions;
    for (const auto& r : results)
        functions.insert(r.function);
    if (functions.size() > 1) {
        std::cerr << "results cover several functions; pick one with --function\n";
        return kExitValidation;
    }
    const std::string out =
        args.out.empty() ? (*functions.begin() + "_" + args.plot + ".svg") : args.out;
    PlotOptions opts;
    opts.log_x = args.logx;
    render_plot(results, kinds[args.plot], out, opts);
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

struct SwitchArgs {
    std::string in = "results";
    int window = 10;
    int persistence = 3;
};

int do_switchpoint(const SwitchArgs& args)
{
    const auto results = load_results(args.in, args.window);
    std::map<std::pair<std::string, double>, std::pair<std::vector<const GainSeries*>,
                                                       std::vector<const GainSeries*>>>
        groups;
    for (const auto& r : results) {
        if (r.trace.size() <= args.window)
            continue;
        auto& g = groups[{r.function, r.eval_time}];
        if (r.algorithm == "bo")
            g.first.push_back(&r.gains);
        else if (r.algorithm == "ea")
            g.second.push_back(&r.gains);
    }
    std::cout << "function,te,switch_point\n";
    int printed = 0;
    for (const auto& [key, g] : groups) {
        if (g.first.empty() || g.second.empty())
            continue;
        const GainSeries bo_avg = average_gain_series(g.first);
        const GainSeries ea_avg = average_gain_series(g.second);
        const auto sp = detect_switch_point(bo_avg, ea_avg, args.persistence);
        std::cout << key.first << ',' << format_g9(key.second) << ','
                  << (sp ? std::to_string(*sp) : "none") << "\n";
        ++printed;
    }
    if (printed == 0) {
        std::cerr << "need both bo and ea runs under " << args.in << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Black-box optimizer benchmark harness (BO, EA, and the BO->EA hybrid)"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "execute optimizer runs and export CSV");
    run->add_option("--function", run_args.functions, "griewank|rastrigin|schwefel")
        ->delimiter(',');
    run->add_option("--algo", run_args.algos, "bo|ea|bea")->delimiter(',');
    run->add_option("--iters", run_args.iters, "evaluations per run");
    run->add_option("--reps", run_args.reps, "repetitions per configuration");
    run->add_option("--te", run_args.te, "simulated evaluation times (s)")->delimiter(',');
    run->add_option("--seed", run_args.seed, "base seed; replicate r uses seed+r");
    run->add_option("--out", run_args.out, "output directory");
    run->add_option("--workers", run_args.workers, "worker threads (0: all cores)");
    run->add_option("--gamma", run_args.gamma, "GP-UCB gamma");
    run->add_option("--theta", run_args.theta, "GP length scale (0: per-function default)");
    run->add_option("--pop", run_args.pop, "EA population size");
    run->add_option("--switch", run_args.switch_point, "BEA switch point");
    run->add_option("--strategy", run_args.strategy, "transfer strategy s1|s2|s3|s4");
    run->add_option("--alpha", run_args.alpha, "sigma'' growth factor");
    run->add_option("--beta", run_args.beta, "sigma'' decay factor");
    run->add_option("--top-percent", run_args.top_percent, "S4 top share (percent)");
    run->add_option("--window", run_args.window, "gain window");

    AnalyzeArgs an_args;
    auto* analyze = app.add_subcommand("analyze", "render an SVG plot from exported CSV");
    analyze->add_option("--in", an_args.in, "input directory");
    analyze->add_option("--plot", an_args.plot,
                        "objective_vs_time|gain_vs_iter|overhead_vs_iter");
    analyze->add_option("--out", an_args.out, "output SVG path");
    analyze->add_option("--function", an_args.function, "restrict to one function");
    analyze->add_option("--te", an_args.te, "restrict to one evaluation time");
    analyze->add_flag("--logx", an_args.logx, "log-scale time axis");
    analyze->add_option("--window", an_args.window, "gain window");

    SwitchArgs sw_args;
    auto* sw = app.add_subcommand("switchpoint", "detect BO/EA gain-curve intersections");
    sw->add_option("--in", sw_args.in, "input directory");
    sw->add_option("--window", sw_args.window, "gain window");
    sw->add_option("--persistence", sw_args.persistence, "consecutive entries required");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (run->parsed())
            return do_run(run_args);
        if (analyze->parsed())
            return do_analyze(an_args);
        if (sw->parsed())
            return do_switchpoint(sw_args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}
