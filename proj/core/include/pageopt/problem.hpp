#pragma once

#include <cstdint>
#include <cstddef>
#include <optional>
#include <stdexcept>

#include "pageopt/vector.hpp"

namespace pageopt {

enum class Certification {
    analytic,           // constant known in closed form from the construction
    computed_by_oracle  // constant certified numerically (power iteration)
};

// Certified constants of a finite-sum objective f = (1/n) sum_i f_i.
//   smoothness:     L with  (1/n) sum_i ||grad f_i(x) - grad f_i(y)||^2 <= L^2 ||x-y||^2
//   variance_bound: sigma^2 with (1/n) sum_i ||grad f_i(x) - grad f(x)||^2 <= sigma^2,
//                   absent when no uniform bound exists
//   optimal_value:  min_x f(x), absent when unknown
struct ProblemConstants {
    double smoothness = 0.0;
    std::optional<double> variance_bound;
    std::optional<double> optimal_value;
    Certification how_certified = Certification::analytic;
};

// A finite-sum (or streaming) smooth objective. Component indices address the
// summands; a streaming problem reinterprets each component access as a fresh
// draw from its sampling distribution, so its effective component count is
// unbounded even though the underlying pool is finite.
class FiniteSumProblem {
public:
    virtual ~FiniteSumProblem() = default;

    virtual std::size_t dim() const = 0;

    /* number of addressable components (for streaming problems: pool size) */
    virtual std::size_t component_count() const = 0;

    virtual bool streaming() const { return false; }

    virtual double value(const Vector& x) const = 0;
    virtual Vector full_gradient(const Vector& x) const = 0;
    virtual double component_value(std::size_t i, const Vector& x) const = 0;
    virtual Vector component_gradient(std::size_t i, const Vector& x) const = 0;

    // grad f_i(x_new) - grad f_i(x_old) evaluated with ONE sample: a streaming
    // problem draws the sample once and reuses it at both points, which is what
    // keeps the correction step's variance proportional to ||x_new - x_old||^2.
    virtual Vector component_gradient_diff(std::size_t i, const Vector& x_new,
                                           const Vector& x_old) const {
        return component_gradient(i, x_new) - component_gradient(i, x_old);
    }

    virtual const ProblemConstants& constants() const = 0;

    /* argmin of f when the construction knows it */
    virtual std::optional<Vector> minimizer() const { return std::nullopt; }

    // Re-seed the internal sampling stream of a streaming problem so that runs
    // are reproducible from their seed alone; no-op for plain finite sums.
    virtual void reset_stream(std::uint64_t /*seed*/) const {}
};

/* f(x0) - f*, the initial optimality gap */
inline double initial_gap(const FiniteSumProblem& problem, const Vector& x0) {
    const auto& c = problem.constants();
    if (!c.optimal_value)
        throw std::invalid_argument("initial_gap: problem has no certified optimal value");
    return problem.value(x0) - *c.optimal_value;
}

}  // namespace pageopt
