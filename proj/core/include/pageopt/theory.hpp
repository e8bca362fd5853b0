#pragma once

#include <cstddef>
#include <optional>

#include "pageopt/optimizer_types.hpp"
#include "pageopt/problem.hpp"

namespace pageopt::theory {

enum class Mode { finite_sum, online };

// Largest admissible stepsize, 1 / (L * (1 + sqrt((1-p) / (p * b_prime)))).
// Nondecreasing in both p and b_prime; equals 1/L at p = 1.
double stepsize_max(double smoothness, double p, std::size_t b_prime);

/* recommended refresh probability b_prime / (b + b_prime) */
double default_probability(std::size_t b, std::size_t b_prime);

// Refresh minibatch size for the online setting: ceil(2 sigma^2 / eps^2),
// capped at n when the problem is a finite sum, and at least 1 (a zero
// variance bound needs no averaging).
std::size_t online_minibatch(double sigma_sq, double epsilon, std::optional<std::size_t> n);

// Iteration counts guaranteeing E||grad f(output)|| <= eps. The _real
// variants return the formula value; the plain ones round up to a count.
double iterations_finite_real(double smoothness, double delta0, double epsilon, double p,
                              std::size_t b_prime);
std::size_t iterations_finite(double smoothness, double delta0, double epsilon, double p,
                              std::size_t b_prime);
double iterations_online_real(double smoothness, double delta0, double epsilon, double p,
                              std::size_t b_prime);
std::size_t iterations_online(double smoothness, double delta0, double epsilon, double p,
                              std::size_t b_prime);

// Expected amortized gradient evaluations of a T-iteration run:
// b + T * (p * b + (1 - p) * b_prime).
double grad_complexity(std::size_t b, double iters, double p, std::size_t b_prime);

// Full default configuration for the given accuracy target, starting from x0:
// b (n, or the online minibatch), b_prime = floor(sqrt(b)), the default
// refresh probability, the maximal stepsize, and the guaranteed iteration
// count. Requires certified L and f* (and sigma^2 in online mode).
PageConfig auto_config(const FiniteSumProblem& problem, double epsilon, Mode mode,
                       const Vector& x0);

}  // namespace pageopt::theory
