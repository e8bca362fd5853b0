#include "pageopt/estimator.hpp"

#include <stdexcept>

namespace pageopt {

void EstimatorParams::validate(const FiniteSumProblem& problem) const {
    if (b == 0)
        throw std::invalid_argument("EstimatorParams: b must be >= 1");
    if (b_prime == 0 || b_prime > b)
        throw std::invalid_argument("EstimatorParams: need 1 <= b_prime <= b");
    if (!(p > 0.0) || p > 1.0)
        throw std::invalid_argument("EstimatorParams: p must be in (0, 1]");
    if (!problem.streaming() && b > problem.component_count())
        throw std::invalid_argument("EstimatorParams: b exceeds component count of a finite problem");
}

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::init: return "init";
        case Branch::big: return "big";
        default: return "small";
    }
}

namespace {

/* mean of a size-b minibatch of component gradients at x */
Vector minibatch_gradient(const FiniteSumProblem& problem, std::size_t b, const Vector& x,
                          RandomSource& rng) {
    MeanAccumulator acc(problem.dim());
    if (problem.streaming()) {
        // the view draws its own sample per access; the index argument is moot
        for (std::size_t j = 0; j < b; ++j) acc.add(problem.component_gradient(0, x));
    } else {
        const auto idx = sample_indices(rng, problem.component_count(), b, true);
        for (const auto i : idx) acc.add(problem.component_gradient(i, x));
    }
    return acc.mean();
}

bool exact_refresh(const FiniteSumProblem& problem, const EstimatorParams& params) {
    return !problem.streaming() && params.b == problem.component_count();
}

}  // namespace

EstimatorState make_initial_estimate(const FiniteSumProblem& problem,
                                     const EstimatorParams& params, const Vector& x0,
                                     RandomSource& rng) {
    params.validate(problem);
    if (x0.size() != problem.dim())
        throw std::invalid_argument("make_initial_estimate: x0 dimension mismatch");
    EstimatorState state;
    state.g = exact_refresh(problem, params) ? problem.full_gradient(x0)
                                             : minibatch_gradient(problem, params.b, x0, rng);
    state.x_prev = x0;
    state.oracle_calls = params.b;
    state.paper_calls = params.b;
    state.history.push_back(Branch::init);
    return state;
}

void estimator_step(EstimatorState& state, const FiniteSumProblem& problem,
                    const EstimatorParams& params, const Vector& x_new, RandomSource& rng) {
    params.validate(problem);
    if (x_new.size() != problem.dim() || state.g.size() != problem.dim())
        throw std::invalid_argument("estimator_step: dimension mismatch");

    const bool refresh = rng.bernoulli(params.p);
    if (refresh) {
        state.g = exact_refresh(problem, params)
                      ? problem.full_gradient(x_new)
                      : minibatch_gradient(problem, params.b, x_new, rng);
        state.oracle_calls += params.b;
        state.paper_calls += params.b;
        state.history.push_back(Branch::big);
    } else {
        MeanAccumulator acc(problem.dim());
        if (problem.streaming()) {
            for (std::size_t j = 0; j < params.b_prime; ++j)
                acc.add(problem.component_gradient_diff(0, x_new, state.x_prev));
        } else {
            const auto idx = sample_indices(rng, problem.component_count(), params.b_prime, true);
            for (const auto i : idx)
                acc.add(problem.component_gradient_diff(i, x_new, state.x_prev));
        }
        state.g = state.g + acc.mean();
        state.oracle_calls += 2 * params.b_prime;
        state.paper_calls += params.b_prime;
        state.history.push_back(Branch::small);
    }
    state.x_prev = x_new;
}

Vector conditional_bias(const EstimatorState& state, const FiniteSumProblem& problem,
                        const Vector& x_new, const EstimatorParams& params) {
    params.validate(problem);
    if (x_new.size() != problem.dim())
        throw std::invalid_argument("conditional_bias: dimension mismatch");
    // refresh branch is unbiased; the correction branch keeps the old error:
    // p * grad f(x_new) + (1-p) * (g + grad f(x_new) - grad f(x_prev)) - grad f(x_new)
    return (1.0 - params.p) * (state.g - problem.full_gradient(state.x_prev));
}

}  // namespace pageopt
