#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pageopt/experiment.hpp"
#include "pageopt/verifier.hpp"

namespace {

// Every experiment field is reachable from the command line; a flag that is
// set wins over the same field in --config.
struct RunFlags {
    std::string config;
    std::optional<std::string> algorithm;
    std::optional<std::string> mode;
    std::optional<double> epsilon;
    std::optional<std::string> seeds;
    std::optional<std::string> out;
    std::optional<std::size_t> diag_interval;
    std::optional<double> eta;
    std::optional<double> p;
    std::optional<std::size_t> b;
    std::optional<std::size_t> b_prime;
    std::optional<std::size_t> iters;
    std::optional<std::string> family;
    std::optional<std::size_t> d;
    std::optional<std::size_t> n;
    std::optional<double> spread;
    std::optional<double> condition;
    std::optional<double> lambda;
    std::optional<std::string> data_csv;
    std::optional<std::uint64_t> problem_seed;
    std::optional<bool> streaming;
    std::optional<bool> normalize;
    std::optional<double> target_gap;
};

void add_experiment_options(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--config", f.config, "JSON experiment config; other flags override it");
    cmd->add_option("--algorithm", f.algorithm, "page, sgd or gd");
    cmd->add_option("--mode", f.mode, "finite or online");
    cmd->add_option("--epsilon", f.epsilon, "accuracy target driving the theory defaults");
    cmd->add_option("--seeds", f.seeds, "run seeds, e.g. 1,2,3 or 1..20");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--diag-interval", f.diag_interval,
                    "record diagnostics every k-th iterate (0 disables)");
    cmd->add_option("--eta", f.eta, "stepsize override");
    cmd->add_option("--p", f.p, "refresh probability override");
    cmd->add_option("--b", f.b, "refresh minibatch size override");
    cmd->add_option("--b-prime", f.b_prime, "correction minibatch size override");
    cmd->add_option("--iters", f.iters, "iteration count override");
    cmd->add_option("--family", f.family,
                    "shared_quadratic, heterogeneous_quadratic or logistic");
    cmd->add_option("--d", f.d, "problem dimension");
    cmd->add_option("--n", f.n, "number of components");
    cmd->add_option("--spread", f.spread, "offset spread (shared_quadratic)");
    cmd->add_option("--condition", f.condition, "curvature spread (heterogeneous_quadratic)");
    cmd->add_option("--lambda", f.lambda, "regularizer weight (logistic)");
    cmd->add_option("--data-csv", f.data_csv, "logistic dataset, rows label,feat1,...,featd");
    cmd->add_option("--problem-seed", f.problem_seed, "instance generator seed");
    cmd->add_option("--streaming", f.streaming, "draw fresh samples every access (true/false)");
    cmd->add_option("--normalize-smoothness", f.normalize, "rescale the family so L = 1");
    cmd->add_option("--target-gap", f.target_gap, "place x0 so that f(x0) - f* has this value");
}

pageopt::ExperimentSpec resolve_spec(const RunFlags& f) {
    pageopt::ExperimentSpec spec =
        f.config.empty() ? pageopt::ExperimentSpec{} : pageopt::load_spec(f.config);
    if (f.algorithm) spec.algorithm = *f.algorithm;
    if (f.mode) spec.mode = pageopt::parse_mode_name(*f.mode);
    if (f.epsilon) spec.epsilon = *f.epsilon;
    if (f.seeds) spec.seeds = pageopt::parse_seed_list(*f.seeds);
    if (f.out) spec.output_dir = *f.out;
    if (f.diag_interval) spec.diagnostics_interval = *f.diag_interval;
    if (f.eta) spec.overrides.eta = *f.eta;
    if (f.p) spec.overrides.p = *f.p;
    if (f.b) spec.overrides.b = *f.b;
    if (f.b_prime) spec.overrides.b_prime = *f.b_prime;
    if (f.iters) spec.overrides.iters = *f.iters;
    if (f.family) spec.problem.family = *f.family;
    if (f.d) spec.problem.d = *f.d;
    if (f.n) spec.problem.n = *f.n;
    if (f.spread) spec.problem.spread = *f.spread;
    if (f.condition) spec.problem.condition = *f.condition;
    if (f.lambda) spec.problem.lambda = *f.lambda;
    if (f.data_csv) spec.problem.csv_path = *f.data_csv;
    if (f.problem_seed) spec.problem.seed = *f.problem_seed;
    if (f.streaming) spec.problem.streaming = *f.streaming;
    if (f.normalize) spec.problem.normalize_smoothness = *f.normalize;
    if (f.target_gap) spec.problem.target_gap = *f.target_gap;
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"variance-reduced stochastic gradient methods: runs, checks and sweeps"};
    app.require_subcommand(1);

    RunFlags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "run one configuration over a set of seeds");
    add_experiment_options(run_cmd, run_flags);

    std::string verify_level = "quick";
    std::string verify_out = "out";
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the built-in inequality check battery");
    verify_cmd->add_option("--level", verify_level, "quick or full")
        ->check(CLI::IsMember({"quick", "full"}));
    verify_cmd->add_option("--out", verify_out, "output directory");

    std::string sweep_values = "100,1000,10000";
    double sweep_epsilon = 0.5;
    std::string sweep_seeds = "1..10";
    std::string sweep_out = "out";
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep-n", "measure how gradient cost scales with the component count");
    sweep_cmd->add_option("--n-values", sweep_values, "component counts, e.g. 100,1000,10000");
    sweep_cmd->add_option("--epsilon", sweep_epsilon, "accuracy target");
    sweep_cmd->add_option("--seeds", sweep_seeds, "run seeds per n");
    sweep_cmd->add_option("--out", sweep_out, "output directory");

    RunFlags compare_flags;
    CLI::App* compare_cmd =
        app.add_subcommand("compare", "equal-budget comparison against sgd and gd");
    add_experiment_options(compare_cmd, compare_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run_cmd->parsed()) return pageopt::cmd_run(resolve_spec(run_flags));
        if (verify_cmd->parsed())
            return pageopt::cmd_verify(verify_level == "full" ? pageopt::VerifyLevel::full
                                                              : pageopt::VerifyLevel::quick,
                                       verify_out);
        if (sweep_cmd->parsed())
            return pageopt::cmd_sweep_n(pageopt::parse_count_list(sweep_values), sweep_epsilon,
                                        pageopt::parse_seed_list(sweep_seeds), sweep_out);
        if (compare_cmd->parsed()) return pageopt::cmd_compare(resolve_spec(compare_flags));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
