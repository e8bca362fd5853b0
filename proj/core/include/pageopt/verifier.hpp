#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pageopt/optimizer_types.hpp"
#include "pageopt/problem.hpp"
#include "pageopt/random.hpp"

namespace pageopt {

// Outcome of one inequality check, always phrased as lhs <= rhs. margin is
// rhs - lhs. Deterministic checks pass when margin >= -tolerance (tolerance
// recorded for the report); Monte Carlo checks pass when
// margin >= -3 * standard_error (plus a machine-precision floor).
struct CheckReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool passed = false;
    std::size_t replicates = 0;      // 0 for deterministic checks
    double standard_error = 0.0;     // 0 for deterministic checks
    double tolerance = 0.0;
};

// One-step descent inequality, per realization (no expectation): with
// x_next = x_t - eta * g_t,
//   f(x_next) <= f(x_t) - eta/2 ||grad f(x_t)||^2
//              - (1/(2 eta) - L/2) ||x_next - x_t||^2
//              + eta/2 ||g_t - grad f(x_t)||^2.
// Deterministic; tolerance 1e-9 * (1 + |f(x_t)|).
CheckReport check_descent_lemma(const FiniteSumProblem& problem, const Vector& x_t,
                                const Vector& g_t, double eta);

// Exact single-step variance recursion on a finite problem with b = n:
//   E||g_next - grad f(x_next)||^2
//     <= (1-p) ||g_t - grad f(x_t)||^2 + (1-p) L^2 / b_prime ||x_next - x_t||^2,
// with the left side computed by enumerating the branch and every correction
// minibatch (n^b_prime outcomes). Deterministic; tolerance 1e-10.
CheckReport check_variance_recursion_exact(const FiniteSumProblem& problem, const Vector& g_t,
                                           const Vector& x_t, const Vector& x_next, double p,
                                           std::size_t b_prime);

// Single-step variance recursion with sampled refreshes (online form, or a
// finite problem with any b): Monte Carlo estimate of the left side over
// `replicates` independent steps against
//   (1-p) ||err_t||^2 + (1-p) L^2/b_prime ||dx||^2 + [b < n] p sigma^2 / b.
// The indicator is 1 for streaming problems (unbounded n).
CheckReport check_variance_recursion_online(const FiniteSumProblem& problem, const Vector& g_t,
                                            const Vector& x_t, const Vector& x_next, double p,
                                            std::size_t b, std::size_t b_prime,
                                            std::size_t replicates, RandomSource& rng);

// Telescoped potential decrease over whole runs: with
// Phi_t = f(x_t) - f* + eta/(2p) ||g_t - grad f(x_t)||^2, averaged over seeds,
//   mean Phi_T <= mean Phi_0 - eta/2 sum_t mean ||grad f(x_t)||^2
//                 (+ [b < n] eta T sigma^2 / (2 b) for sampled refreshes).
// Runs with p = 1, b = n are deterministic and checked per run at 1e-9.
CheckReport check_lyapunov_telescoping(const FiniteSumProblem& problem, const PageConfig& config,
                                       const std::vector<std::uint64_t>& seeds);

// Initial potential bound: E[Phi_0] <= f(x0) - f* + [b < n] eta sigma^2 / (2 p b),
// Monte Carlo over fresh initial estimates at a random x0.
CheckReport check_phi0_bound(const FiniteSumProblem& problem, std::size_t b, double p,
                             double eta, std::size_t replicates, RandomSource& rng);

// Output-selection consistency: over seeds, mean ||grad f(x_hat)|| must not
// exceed sqrt(mean ||grad f(x_hat)||^2) (root-mean-square dominates the mean).
CheckReport check_jensen_output(const FiniteSumProblem& problem, const PageConfig& config,
                                const std::vector<std::uint64_t>& seeds);

// Certified-constant spot checks over random pairs/points:
// mean-squared smoothness (mean_i ||grad f_i(x) - grad f_i(y)||^2 vs L^2||x-y||^2)
// and the variance bound (mean_i ||grad f_i(x) - grad f(x)||^2 vs sigma^2).
CheckReport check_average_smoothness(const FiniteSumProblem& problem, std::size_t pairs,
                                     RandomSource& rng);
CheckReport check_bounded_variance(const FiniteSumProblem& problem, std::size_t points,
                                   RandomSource& rng);

enum class VerifyLevel { quick, full };

// The named, fixed-seed battery behind the `verify` command: assumption spot
// checks, descent audits, exact and sampled variance recursions, potential
// telescoping, initial-potential bounds and output-selection checks across
// the problem zoo. quick ~ 1e4 replicates per Monte Carlo check, full ~ 1e5.
std::vector<CheckReport> run_verification_suite(VerifyLevel level, std::size_t max_threads);

}  // namespace pageopt
