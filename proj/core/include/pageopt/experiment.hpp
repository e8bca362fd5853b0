#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pageopt/optimizer_types.hpp"
#include "pageopt/problem.hpp"
#include "pageopt/theory.hpp"
#include "pageopt/verifier.hpp"

namespace pageopt {

// Named problem family plus its generator knobs. Families:
//   shared_quadratic        (d, n, spread)
//   heterogeneous_quadratic (d, n, condition)
//   logistic                (d, n, lambda; or csv_path + lambda)
// streaming wraps the family in a per-run streaming view (needs sigma^2).
// normalize_smoothness rescales a heterogeneous family so L = 1; target_gap
// moves the start point along a random ray from the minimizer so that
// f(x0) - f* equals the requested value exactly.
struct ProblemSpec {
    std::string family = "heterogeneous_quadratic";
    std::size_t d = 10;
    std::size_t n = 100;
    double spread = 1.0;
    double condition = 10.0;
    double lambda = 0.1;
    std::optional<std::string> csv_path;
    std::uint64_t seed = 1;
    bool streaming = false;
    bool normalize_smoothness = false;
    std::optional<double> target_gap;
};

struct ConfigOverrides {
    std::optional<double> eta;
    std::optional<double> p;
    std::optional<std::size_t> b;
    std::optional<std::size_t> b_prime;
    std::optional<std::size_t> iters;
};

struct ExperimentSpec {
    ProblemSpec problem;
    std::string algorithm = "page";  // page | sgd | gd
    theory::Mode mode = theory::Mode::finite_sum;
    double epsilon = 0.1;
    std::vector<std::uint64_t> seeds = {1};
    std::string output_dir = "out";
    std::size_t diagnostics_interval = 0;
    ConfigOverrides overrides;
};

/* JSON config mirroring ExperimentSpec field for field */
ExperimentSpec load_spec(const std::string& path);
ExperimentSpec parse_spec(const std::string& json_text);

/* "finite" | "online" */
theory::Mode parse_mode_name(const std::string& name);

/* comma-separated values with ranges, e.g. "1,2,3" or "1..20" or "5,10..12" */
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<std::size_t> parse_count_list(const std::string& text);

/* the finite base problem named by the spec (streaming views are added per run) */
std::shared_ptr<FiniteSumProblem> build_problem(const ProblemSpec& spec);

/* origin, or the gap-controlled start point when target_gap is set */
Vector starting_point(const FiniteSumProblem& problem, const ProblemSpec& spec);

// The run configuration: theory defaults (refresh size, correction size,
// probability, stepsize, iteration count) with any explicit overrides applied
// on top. Fields that stay on their defaults need the constants the formulas
// use (f* for the iteration count, sigma^2 for the online refresh size).
PageConfig resolve_config(const FiniteSumProblem& problem, const ExperimentSpec& spec,
                          const Vector& x0);

/* shortest decimal form that parses back to the same double */
std::string format_double(double v);

// trace CSV: t,branch,f_val,grad_norm_sq,est_err_sq,lyapunov,oracle_calls,paper_calls
// (diagnostic columns are empty at steps without diagnostics)
void write_trace_csv(std::ostream& out, const RunResult& result);

struct SummaryRow {
    std::uint64_t seed = 0;
    double final_grad_norm = 0.0;
    double final_f = 0.0;
    std::size_t chosen_index = 0;
    std::size_t iters = 0;
    std::uint64_t oracle_calls = 0;
    std::uint64_t paper_calls = 0;
    std::optional<std::size_t> theory_iters;
    std::optional<double> theory_grad_complexity;
};

// summary CSV: seed,final_grad_norm,final_f,chosen_index,T,oracle_calls,
//              paper_calls,theory_T,theory_grad_complexity
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

void write_verify_report_csv(std::ostream& out, const std::vector<CheckReport>& reports);

struct SweepRow {
    std::size_t n = 0;
    std::size_t b = 0;
    std::size_t b_prime = 0;
    double p = 0.0;
    double eta = 0.0;
    std::size_t iters = 0;
    double mean_extra_paper_calls = 0.0;  // mean over seeds of paper_calls - b
    double se_extra_paper_calls = 0.0;
    double theory_extra_paper_calls = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<double> slope;      // log-log slope of mean extra calls vs n
    std::optional<double> intercept;
};

// Exit codes shared by all commands: 0 success, 1 a verification check or
// comparison criterion failed, 2 invalid input.

/* run the configured algorithm over all seeds; trace_<seed>.csv + summary.csv */
int cmd_run(const ExperimentSpec& spec);

/* run the fixed check battery; verify_report.csv; exit 1 on any failure */
int cmd_verify(VerifyLevel level, const std::string& output_dir);

// For each n: a fresh gap- and smoothness-controlled heterogeneous family,
// theory-default configuration, `seeds` runs; reports mean amortized calls
// beyond the initial refresh and the fitted log-log slope. sweep.csv +
// sweep_fit.csv.
SweepResult sweep_n(const std::vector<std::size_t>& n_values, double epsilon,
                    const std::vector<std::uint64_t>& seeds);
int cmd_sweep_n(const std::vector<std::size_t>& n_values, double epsilon,
                const std::vector<std::uint64_t>& seeds, const std::string& output_dir);

// Equal-budget comparison: the refresh/correction method against plain SGD
// and full-gradient descent, every algorithm capped at the same amortized
// gradient budget; compare.csv with per-algorithm means.
int cmd_compare(const ExperimentSpec& spec);

}  // namespace pageopt
