#pragma once

#include <cstdint>
#include <vector>

#include "pageopt/problem.hpp"
#include "pageopt/random.hpp"
#include "pageopt/vector.hpp"

namespace pageopt {

// Parameters of the probabilistic gradient estimator: each step refreshes the
// estimate from a size-b minibatch with probability p, and otherwise applies a
// cheap size-b_prime correction built from paired gradient differences.
struct EstimatorParams {
    std::size_t b = 1;        // refresh minibatch size
    std::size_t b_prime = 1;  // correction minibatch size
    double p = 1.0;           // refresh probability, in (0, 1]

    void validate(const FiniteSumProblem& problem) const;
};

enum class Branch { init, big, small };

const char* branch_name(Branch b);

struct EstimatorState {
    Vector g;                          // current gradient estimate
    Vector x_prev;                     // point g corresponds to
    std::uint64_t oracle_calls = 0;    // physical component-gradient evaluations
    std::uint64_t paper_calls = 0;     // amortized count: a correction step is
                                       // charged b_prime, not 2*b_prime
    std::vector<Branch> history;       // history[0] == init, then one entry per step

    Branch last_branch() const { return history.back(); }
};

// g = minibatch gradient of size b at x0. When the problem is finite and
// b == n this is the exact full gradient, computed deterministically without
// touching the random source. Both counters are charged b.
EstimatorState make_initial_estimate(const FiniteSumProblem& problem,
                                     const EstimatorParams& params, const Vector& x0,
                                     RandomSource& rng);

// One estimator transition to the new point. The branch coin is flipped
// BEFORE any minibatch index is drawn, so the random stream layout per step
// is: 1 branch draw, then the minibatch draws of whichever branch fired.
// Refresh: g = fresh size-b minibatch gradient at x_new (exact full gradient
// when b == n on a finite problem), charging b to both counters.
// Correction: g += mean over b_prime paired samples of
// grad f_i(x_new) - grad f_i(x_prev), charging 2*b_prime physical evaluations
// but only b_prime amortized ones.
void estimator_step(EstimatorState& state, const FiniteSumProblem& problem,
                    const EstimatorParams& params, const Vector& x_new, RandomSource& rng);

// E[g_next | g, x_prev, x_new] - grad f(x_new), which the refresh/correction
// mixture makes exactly (1 - p) * (g - grad f(x_prev)). Uses analytic full
// gradients and charges no oracle calls.
Vector conditional_bias(const EstimatorState& state, const FiniteSumProblem& problem,
                        const Vector& x_new, const EstimatorParams& params);

}  // namespace pageopt
