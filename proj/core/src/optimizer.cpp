#include "pageopt/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace pageopt {

namespace {

constexpr double kDivergenceCap = 1e12;

void validate(const PageConfig& config, const FiniteSumProblem& problem) {
    config.params.validate(problem);
    if (!(config.eta >= 0.0) || !std::isfinite(config.eta))
        throw std::invalid_argument("PageConfig: eta must be finite and >= 0");
    if (config.iters == 0)
        throw std::invalid_argument("PageConfig: iters must be >= 1");
    if (config.epsilon < 0.0)
        throw std::invalid_argument("PageConfig: epsilon must be >= 0");
    if (config.x0 && config.x0->size() != problem.dim())
        throw std::invalid_argument("PageConfig: x0 dimension mismatch");
}

bool within_bounds(const Vector& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) return false;
        s += x[i] * x[i];
    }
    return s <= kDivergenceCap * kDivergenceCap;
}

struct DiagnosticSnapshot {
    double f_val;
    double grad_norm_sq;
    double est_err_sq;
    std::optional<double> lyapunov;
};

DiagnosticSnapshot take_diagnostics(const FiniteSumProblem& problem, const Vector& x,
                                    const Vector& g, const PageConfig& config) {
    DiagnosticSnapshot d{};
    d.f_val = problem.value(x);
    const Vector grad = problem.full_gradient(x);
    d.grad_norm_sq = norm_sq(grad);
    d.est_err_sq = norm_sq(g - grad);
    if (const auto& fstar = problem.constants().optimal_value)
        d.lyapunov = d.f_val - *fstar + config.eta / (2.0 * config.params.p) * d.est_err_sq;
    return d;
}

}  // namespace

RunResult run_page(const FiniteSumProblem& problem, const PageConfig& config) {
    validate(config, problem);
    RandomSource rng(config.seed);
    // give a streaming view a per-run stream so identical (config, seed) replays
    if (problem.streaming()) problem.reset_stream(rng.split().seed());

    const std::size_t T = config.iters;
    const std::size_t interval = config.diagnostics_interval;
    const std::size_t chosen = static_cast<std::size_t>(rng.uniform_int(T));

    RunResult result;
    result.chosen_index = chosen;

    Vector x = config.x0 ? *config.x0 : Vector(problem.dim());
    auto est = make_initial_estimate(problem, config.params, x, rng);
    result.x_hat = x;  // overwritten when the chosen iterate is reached; x^0 if chosen == 0

    auto record = [&](std::size_t t, Branch branch) {
        TelemetryRecord rec;
        rec.t = t;
        rec.branch = branch;
        rec.oracle_calls = est.oracle_calls;
        rec.paper_calls = est.paper_calls;
        const bool periodic = interval > 0 && t % interval == 0;
        if (periodic || t == chosen) {
            const auto d = take_diagnostics(problem, x, est.g, config);
            rec.f_val = d.f_val;
            rec.grad_norm_sq = d.grad_norm_sq;
            rec.est_err_sq = d.est_err_sq;
            rec.lyapunov = d.lyapunov;
        }
        result.trace.push_back(std::move(rec));
        return result.trace.back().f_val;
    };

    auto f0 = record(0, Branch::init);
    if (f0 && !(std::abs(*f0) <= kDivergenceCap)) {
        result.aborted = true;
        result.abort_iteration = 0;
    }

    for (std::size_t t = 0; !result.aborted && t < T; ++t) {
        Vector x_next(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) x_next[i] = x[i] - config.eta * est.g[i];
        if (!within_bounds(x_next)) {
            result.aborted = true;
            result.abort_iteration = t + 1;
            break;
        }
        estimator_step(est, problem, config.params, x_next, rng);
        x = x_next;
        if (t + 1 == chosen) result.x_hat = x;
        const auto f = record(t + 1, est.last_branch());
        if (f && !(std::abs(*f) <= kDivergenceCap)) {
            result.aborted = true;
            result.abort_iteration = t + 1;
            break;
        }
    }

    result.oracle_calls = est.oracle_calls;
    result.paper_calls = est.paper_calls;
    return result;
}

RunResult run_gd(const FiniteSumProblem& problem, double eta, std::size_t iters,
                 const Vector& x0, std::uint64_t seed, std::size_t diagnostics_interval) {
    if (problem.streaming())
        throw std::invalid_argument("run_gd: full-gradient descent needs a finite problem");
    PageConfig cfg;
    cfg.eta = eta;
    cfg.params = {problem.component_count(), 1, 1.0};
    cfg.iters = iters;
    cfg.seed = seed;
    cfg.x0 = x0;
    cfg.diagnostics_interval = diagnostics_interval;
    return run_page(problem, cfg);
}

RunResult run_sgd(const FiniteSumProblem& problem, double eta, std::size_t b,
                  std::size_t iters, const Vector& x0, std::uint64_t seed,
                  std::size_t diagnostics_interval) {
    PageConfig cfg;
    cfg.eta = eta;
    cfg.params = {b, 1, 1.0};
    cfg.iters = iters;
    cfg.seed = seed;
    cfg.x0 = x0;
    cfg.diagnostics_interval = diagnostics_interval;
    return run_page(problem, cfg);
}

}  // namespace pageopt
