#include "pageopt/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace pageopt::theory {

namespace {

void check_positive(double v, const char* who) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(who) + " must be positive and finite");
}

void check_prob(double p) {
    if (!(p > 0.0) || p > 1.0)
        throw std::invalid_argument("theory: p must be in (0, 1]");
}

// Round a formula value up to an iteration count. Exact-integer formula
// values can land one ulp above the integer; the tiny backoff keeps them
// from being bumped a full step up.
std::size_t count_ceil(double v) {
    if (!(v >= 0.0) || !std::isfinite(v))
        throw std::domain_error("theory: iteration count formula is not finite");
    const double nudged = v - (1e-9 + 1e-12 * v);
    const double c = std::ceil(nudged);
    return c < 1.0 ? std::size_t{1} : static_cast<std::size_t>(c);
}

/* 1 + sqrt((1-p) / (p * b_prime)) */
double stepsize_denominator(double p, std::size_t b_prime) {
    check_prob(p);
    if (b_prime == 0)
        throw std::invalid_argument("theory: b_prime must be >= 1");
    return 1.0 + std::sqrt((1.0 - p) / (p * static_cast<double>(b_prime)));
}

}  // namespace

double stepsize_max(double smoothness, double p, std::size_t b_prime) {
    check_positive(smoothness, "theory: smoothness");
    return 1.0 / (smoothness * stepsize_denominator(p, b_prime));
}

double default_probability(std::size_t b, std::size_t b_prime) {
    if (b_prime == 0 || b_prime > b)
        throw std::invalid_argument("theory: need 1 <= b_prime <= b");
    return static_cast<double>(b_prime) / static_cast<double>(b + b_prime);
}

std::size_t online_minibatch(double sigma_sq, double epsilon, std::optional<std::size_t> n) {
    if (sigma_sq < 0.0)
        throw std::invalid_argument("theory: sigma_sq must be >= 0");
    check_positive(epsilon, "theory: epsilon");
    std::size_t b = count_ceil(2.0 * sigma_sq / (epsilon * epsilon));
    if (n && b > *n) b = *n;
    return b;
}

double iterations_finite_real(double smoothness, double delta0, double epsilon, double p,
                              std::size_t b_prime) {
    check_positive(smoothness, "theory: smoothness");
    check_positive(epsilon, "theory: epsilon");
    if (delta0 < 0.0)
        throw std::invalid_argument("theory: delta0 must be >= 0");
    return 2.0 * smoothness * delta0 / (epsilon * epsilon) * stepsize_denominator(p, b_prime);
}

std::size_t iterations_finite(double smoothness, double delta0, double epsilon, double p,
                              std::size_t b_prime) {
    return count_ceil(iterations_finite_real(smoothness, delta0, epsilon, p, b_prime));
}

double iterations_online_real(double smoothness, double delta0, double epsilon, double p,
                              std::size_t b_prime) {
    check_positive(smoothness, "theory: smoothness");
    check_positive(epsilon, "theory: epsilon");
    if (delta0 < 0.0)
        throw std::invalid_argument("theory: delta0 must be >= 0");
    return 4.0 * smoothness * delta0 / (epsilon * epsilon) * stepsize_denominator(p, b_prime) +
           1.0 / p;
}

std::size_t iterations_online(double smoothness, double delta0, double epsilon, double p,
                              std::size_t b_prime) {
    return count_ceil(iterations_online_real(smoothness, delta0, epsilon, p, b_prime));
}

double grad_complexity(std::size_t b, double iters, double p, std::size_t b_prime) {
    check_prob(p);
    if (b_prime == 0 || b_prime > b)
        throw std::invalid_argument("theory: need 1 <= b_prime <= b");
    if (iters < 0.0)
        throw std::invalid_argument("theory: iters must be >= 0");
    const auto bd = static_cast<double>(b);
    const auto bpd = static_cast<double>(b_prime);
    return bd + iters * (p * bd + (1.0 - p) * bpd);
}

PageConfig auto_config(const FiniteSumProblem& problem, double epsilon, Mode mode,
                       const Vector& x0) {
    check_positive(epsilon, "theory: epsilon");
    if (x0.size() != problem.dim())
        throw std::invalid_argument("auto_config: x0 dimension mismatch");
    const auto& c = problem.constants();
    if (mode == Mode::finite_sum && problem.streaming())
        throw std::invalid_argument("auto_config: streaming problems need online mode");

    std::size_t b;
    if (mode == Mode::finite_sum) {
        b = problem.component_count();
    } else {
        if (!c.variance_bound)
            throw std::invalid_argument("auto_config: online mode needs a certified sigma^2");
        const std::optional<std::size_t> cap =
            problem.streaming() ? std::nullopt : std::optional{problem.component_count()};
        b = online_minibatch(*c.variance_bound, epsilon, cap);
    }
    const auto b_prime =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(
                                     static_cast<double>(b)))));
    const double p = default_probability(b, b_prime);
    const double delta0 = initial_gap(problem, x0);

    PageConfig cfg;
    cfg.params = {b, b_prime, p};
    cfg.eta = stepsize_max(c.smoothness, p, b_prime);
    cfg.iters = mode == Mode::finite_sum
                    ? iterations_finite(c.smoothness, delta0, epsilon, p, b_prime)
                    : iterations_online(c.smoothness, delta0, epsilon, p, b_prime);
    cfg.epsilon = epsilon;
    cfg.x0 = x0;
    return cfg;
}

}  // namespace pageopt::theory
