#pragma once

#include "pageopt/optimizer_types.hpp"
#include "pageopt/problem.hpp"

namespace pageopt {

// Run the probabilistic-estimator method: x_{t+1} = x_t - eta * g_t with the
// estimator advanced after every move, for config.iters steps. The reported
// iterate is x^(chosen_index) with chosen_index drawn uniformly from
// {0, ..., T-1} before anything else consumes the run's random stream.
//
// A diagnostic record is always taken at t = chosen_index (on top of the
// periodic ones) so that summary statistics can be recomputed from the trace.
// Divergence guard: the run aborts, flagged with the offending iteration,
// as soon as an iterate is non-finite or ||x|| exceeds 1e12 (or the objective
// does, at diagnostic steps).
RunResult run_page(const FiniteSumProblem& problem, const PageConfig& config);

// Deterministic full-gradient descent: run_page with p = 1 and b = n, whose
// refresh branch evaluates the exact gradient without sampling. Finite
// problems only.
RunResult run_gd(const FiniteSumProblem& problem, double eta, std::size_t iters,
                 const Vector& x0, std::uint64_t seed = 0,
                 std::size_t diagnostics_interval = 0);

// Plain minibatch SGD: run_page with p = 1 and refresh size b every step.
RunResult run_sgd(const FiniteSumProblem& problem, double eta, std::size_t b,
                  std::size_t iters, const Vector& x0, std::uint64_t seed,
                  std::size_t diagnostics_interval = 0);

}  // namespace pageopt
