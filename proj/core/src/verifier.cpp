#include "pageopt/verifier.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pageopt/optimizer.hpp"
#include "pageopt/parallel.hpp"
#include "pageopt/problems.hpp"
#include "pageopt/theory.hpp"

namespace pageopt {

namespace {

Vector random_vector(RandomSource& rng, std::size_t d, double scale) {
    Vector v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = scale * rng.normal();
    return v;
}

struct RunningStats {
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t count = 0;

    void add(double v) {
        ++count;
        const double delta = v - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (v - mean);
    }

    double variance() const {
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }

    double standard_error() const {
        return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
    }
};

CheckReport deterministic_report(std::string name, double lhs, double rhs, double tolerance) {
    CheckReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tolerance = tolerance;
    r.passed = r.margin >= -tolerance;
    return r;
}

CheckReport monte_carlo_report(std::string name, double lhs, double rhs, std::size_t replicates,
                               double se) {
    CheckReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.replicates = replicates;
    r.standard_error = se;
    // the machine-precision floor keeps exact-equality cases (se == 0) honest
    r.tolerance = 3.0 * se + 1e-12 * (1.0 + std::abs(rhs));
    r.passed = r.margin >= -r.tolerance;
    return r;
}

void require_finite_problem(const FiniteSumProblem& problem, const char* who) {
    if (problem.streaming())
        throw std::invalid_argument(std::string(who) + ": needs a finite problem (streaming "
                                                       "components cannot be enumerated)");
}

double certified_sigma_sq(const FiniteSumProblem& problem, const char* who) {
    const auto& vb = problem.constants().variance_bound;
    if (!vb)
        throw std::invalid_argument(std::string(who) + ": problem has no certified sigma^2");
    return *vb;
}

double certified_f_star(const FiniteSumProblem& problem, const char* who) {
    const auto& fs = problem.constants().optimal_value;
    if (!fs)
        throw std::invalid_argument(std::string(who) + ": problem has no certified optimal value");
    return *fs;
}

}  // namespace

CheckReport check_descent_lemma(const FiniteSumProblem& problem, const Vector& x_t,
                                const Vector& g_t, double eta) {
    if (!(eta > 0.0))
        throw std::invalid_argument("check_descent_lemma: eta must be positive");
    const double L = problem.constants().smoothness;
    Vector x_next(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) x_next[i] = x_t[i] - eta * g_t[i];

    const double f_t = problem.value(x_t);
    const Vector grad_t = problem.full_gradient(x_t);
    const double lhs = problem.value(x_next);
    const double rhs = f_t - 0.5 * eta * norm_sq(grad_t) -
                       (0.5 / eta - 0.5 * L) * norm_sq(x_next - x_t) +
                       0.5 * eta * norm_sq(g_t - grad_t);
    return deterministic_report("descent_lemma", lhs, rhs, 1e-9 * (1.0 + std::abs(f_t)));
}

CheckReport check_variance_recursion_exact(const FiniteSumProblem& problem, const Vector& g_t,
                                           const Vector& x_t, const Vector& x_next, double p,
                                           std::size_t b_prime) {
    require_finite_problem(problem, "check_variance_recursion_exact");
    const std::size_t n = problem.component_count();
    if (n > 12)
        throw std::invalid_argument("check_variance_recursion_exact: enumeration needs n <= 12");
    if (b_prime == 0 || b_prime > n)
        throw std::invalid_argument("check_variance_recursion_exact: need 1 <= b_prime <= n");
    if (!(p > 0.0) || p > 1.0)
        throw std::invalid_argument("check_variance_recursion_exact: p must be in (0, 1]");
    double outcomes = 1.0;
    for (std::size_t j = 0; j < b_prime; ++j) outcomes *= static_cast<double>(n);
    if (outcomes > 2e6)
        throw std::invalid_argument("check_variance_recursion_exact: outcome tree too large");

    const Vector grad_next = problem.full_gradient(x_next);
    const Vector grad_t = problem.full_gradient(x_t);
    std::vector<Vector> diffs;
    diffs.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        diffs.push_back(problem.component_gradient_diff(i, x_next, x_t));

    // refresh branch with b = n is the exact gradient: zero error, weight p.
    // Walk every correction minibatch (i_1, ..., i_{b_prime}) in [n]^{b_prime}
    // with an odometer; each has weight (1-p)/n^{b_prime}.
    double lhs = 0.0;
    std::vector<std::size_t> tuple(b_prime, 0);
    const double tuple_weight = (1.0 - p) / outcomes;
    if (p < 1.0) {
        for (;;) {
            MeanAccumulator acc(problem.dim());
            for (const auto i : tuple) acc.add(diffs[i]);
            lhs += tuple_weight * norm_sq(g_t + acc.mean() - grad_next);
            std::size_t pos = 0;
            while (pos < b_prime && ++tuple[pos] == n) tuple[pos++] = 0;
            if (pos == b_prime) break;
        }
    }

    const double L = problem.constants().smoothness;
    const double rhs = (1.0 - p) * norm_sq(g_t - grad_t) +
                       (1.0 - p) * L * L / static_cast<double>(b_prime) * norm_sq(x_next - x_t);
    auto report = deterministic_report("variance_recursion_exact", lhs, rhs, 1e-10);
    return report;
}

CheckReport check_variance_recursion_online(const FiniteSumProblem& problem, const Vector& g_t,
                                            const Vector& x_t, const Vector& x_next, double p,
                                            std::size_t b, std::size_t b_prime,
                                            std::size_t replicates, RandomSource& rng) {
    if (replicates == 0)
        throw std::invalid_argument("check_variance_recursion_online: needs replicates >= 1");
    EstimatorParams params{b, b_prime, p};
    params.validate(problem);
    const bool sampled_refresh = problem.streaming() || b < problem.component_count();
    const double sigma_sq =
        sampled_refresh ? certified_sigma_sq(problem, "check_variance_recursion_online") : 0.0;

    const Vector grad_next = problem.full_gradient(x_next);
    RunningStats stats;
    for (std::size_t r = 0; r < replicates; ++r) {
        if (problem.streaming()) problem.reset_stream(rng.next_u64());
        EstimatorState state;
        state.g = g_t;
        state.x_prev = x_t;
        state.history.push_back(Branch::init);
        estimator_step(state, problem, params, x_next, rng);
        stats.add(norm_sq(state.g - grad_next));
    }

    const double L = problem.constants().smoothness;
    double rhs = (1.0 - p) * norm_sq(g_t - problem.full_gradient(x_t)) +
                 (1.0 - p) * L * L / static_cast<double>(b_prime) * norm_sq(x_next - x_t);
    if (sampled_refresh) rhs += p * sigma_sq / static_cast<double>(b);
    auto report = monte_carlo_report("variance_recursion_online", stats.mean, rhs, replicates,
                                     stats.standard_error());
    return report;
}

CheckReport check_lyapunov_telescoping(const FiniteSumProblem& problem, const PageConfig& config,
                                       const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty())
        throw std::invalid_argument("check_lyapunov_telescoping: needs at least one seed");
    certified_f_star(problem, "check_lyapunov_telescoping");
    const std::size_t b = config.params.b;
    const double p = config.params.p;
    const bool sampled_refresh = problem.streaming() || b < problem.component_count();
    const double sigma_sq =
        sampled_refresh ? certified_sigma_sq(problem, "check_lyapunov_telescoping") : 0.0;
    const bool deterministic = p == 1.0 && !sampled_refresh;

    PageConfig cfg = config;
    cfg.diagnostics_interval = 1;  // the potential needs every iterate instrumented

    const double T = static_cast<double>(cfg.iters);
    const double extra = sampled_refresh
                             ? cfg.eta * T * sigma_sq / (2.0 * static_cast<double>(b))
                             : 0.0;

    auto potential = [&](const TelemetryRecord& rec) {
        return *rec.lyapunov;  // f - f* + eta/(2p) * est_err_sq, filled by the run
    };

    RunningStats phi_start, phi_end, grad_sum, slack;
    for (const auto seed : seeds) {
        cfg.seed = seed;
        const RunResult run = run_page(problem, cfg);
        if (run.aborted || run.trace.size() != cfg.iters + 1) {
            CheckReport r;
            r.name = "lyapunov_telescoping";
            r.lhs = std::numeric_limits<double>::infinity();
            r.margin = -std::numeric_limits<double>::infinity();
            r.passed = false;
            return r;
        }
        double gsum = 0.0;
        for (std::size_t t = 0; t < cfg.iters; ++t) gsum += *run.trace[t].grad_norm_sq;
        const double p0 = potential(run.trace.front());
        const double pT = potential(run.trace.back());
        phi_start.add(p0);
        phi_end.add(pT);
        grad_sum.add(gsum);
        slack.add(pT - p0 + 0.5 * cfg.eta * gsum - extra);
    }

    const double lhs = phi_end.mean;
    const double rhs = phi_start.mean - 0.5 * cfg.eta * grad_sum.mean + extra;
    if (deterministic) {
        auto report = deterministic_report("lyapunov_telescoping", lhs, rhs,
                                           1e-9 * (1.0 + std::abs(phi_start.mean)));
        return report;
    }
    auto report = monte_carlo_report("lyapunov_telescoping", lhs, rhs, seeds.size(),
                                     slack.standard_error());
    return report;
}

CheckReport check_phi0_bound(const FiniteSumProblem& problem, std::size_t b, double p,
                             double eta, std::size_t replicates, RandomSource& rng) {
    if (replicates == 0)
        throw std::invalid_argument("check_phi0_bound: needs replicates >= 1");
    if (!(eta >= 0.0) || !(p > 0.0) || p > 1.0)
        throw std::invalid_argument("check_phi0_bound: need eta >= 0 and p in (0, 1]");
    const double f_star = certified_f_star(problem, "check_phi0_bound");
    EstimatorParams params{b, std::min<std::size_t>(b, 1), p};
    params.validate(problem);
    const bool sampled_refresh = problem.streaming() || b < problem.component_count();
    const double sigma_sq = sampled_refresh ? certified_sigma_sq(problem, "check_phi0_bound") : 0.0;

    const Vector x0 = random_vector(rng, problem.dim(), 1.0);
    const double gap = problem.value(x0) - f_star;
    const Vector grad0 = problem.full_gradient(x0);

    RunningStats stats;
    for (std::size_t r = 0; r < replicates; ++r) {
        if (problem.streaming()) problem.reset_stream(rng.next_u64());
        const auto est = make_initial_estimate(problem, params, x0, rng);
        stats.add(gap + eta / (2.0 * p) * norm_sq(est.g - grad0));
    }

    double rhs = gap;
    if (sampled_refresh) rhs += eta * sigma_sq / (2.0 * p * static_cast<double>(b));
    auto report = monte_carlo_report("phi0_bound", stats.mean, rhs, replicates,
                                     stats.standard_error());
    return report;
}

CheckReport check_jensen_output(const FiniteSumProblem& problem, const PageConfig& config,
                                const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty())
        throw std::invalid_argument("check_jensen_output: needs at least one seed");
    RunningStats norms, squares;
    PageConfig cfg = config;
    for (const auto seed : seeds) {
        cfg.seed = seed;
        const RunResult run = run_page(problem, cfg);
        if (run.aborted) {
            CheckReport r;
            r.name = "jensen_output";
            r.lhs = std::numeric_limits<double>::infinity();
            r.margin = -std::numeric_limits<double>::infinity();
            r.passed = false;
            return r;
        }
        const double z = norm(problem.full_gradient(run.x_hat));
        norms.add(z);
        squares.add(z * z);
    }
    auto report = monte_carlo_report("jensen_output", norms.mean, std::sqrt(squares.mean),
                                     seeds.size(), norms.standard_error());
    return report;
}

CheckReport check_average_smoothness(const FiniteSumProblem& problem, std::size_t pairs,
                                     RandomSource& rng) {
    require_finite_problem(problem, "check_average_smoothness");
    if (pairs == 0)
        throw std::invalid_argument("check_average_smoothness: needs pairs >= 1");
    const double L = problem.constants().smoothness;
    const std::size_t n = problem.component_count();
    CheckReport worst;
    bool first = true;
    for (std::size_t k = 0; k < pairs; ++k) {
        const Vector x = random_vector(rng, problem.dim(), 1.5);
        const Vector y = random_vector(rng, problem.dim(), 1.5);
        double lhs = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            lhs += norm_sq(problem.component_gradient(i, x) - problem.component_gradient(i, y));
        lhs /= static_cast<double>(n);
        const double rhs = L * L * norm_sq(x - y);
        auto rep = deterministic_report("average_smoothness", lhs, rhs, 1e-9 * rhs);
        if (first || rep.margin + rep.tolerance < worst.margin + worst.tolerance) {
            worst = rep;
            first = false;
        }
        if (!rep.passed) worst.passed = false;
    }
    return worst;
}

CheckReport check_bounded_variance(const FiniteSumProblem& problem, std::size_t points,
                                   RandomSource& rng) {
    require_finite_problem(problem, "check_bounded_variance");
    if (points == 0)
        throw std::invalid_argument("check_bounded_variance: needs points >= 1");
    const double sigma_sq = certified_sigma_sq(problem, "check_bounded_variance");
    const std::size_t n = problem.component_count();
    CheckReport worst;
    bool first = true;
    for (std::size_t k = 0; k < points; ++k) {
        const Vector x = random_vector(rng, problem.dim(), 1.5);
        const Vector grad = problem.full_gradient(x);
        double lhs = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            lhs += norm_sq(problem.component_gradient(i, x) - grad);
        lhs /= static_cast<double>(n);
        auto rep = deterministic_report("bounded_variance", lhs, sigma_sq,
                                        1e-9 * (1.0 + sigma_sq));
        if (first || rep.margin + rep.tolerance < worst.margin + worst.tolerance) {
            worst = rep;
            first = false;
        }
        if (!rep.passed) worst.passed = false;
    }
    return worst;
}

/* ---------------- the named verification battery ---------------- */

namespace {

CheckReport named(CheckReport r, std::string name) {
    r.name = std::move(name);
    return r;
}

/* worst-case aggregation of per-state reports, keeping the pass conjunction */
CheckReport worst_of(const std::vector<CheckReport>& reports, std::string name) {
    CheckReport worst = reports.front();
    bool all_passed = true;
    for (const auto& r : reports) {
        all_passed = all_passed && r.passed;
        if (r.margin + r.tolerance < worst.margin + worst.tolerance) worst = r;
    }
    worst.name = std::move(name);
    worst.passed = all_passed;
    return worst;
}

struct SuiteSettings {
    std::size_t mc_replicates;
    std::size_t run_seeds;
};

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
    std::vector<std::uint64_t> seeds(count);
    for (std::size_t i = 0; i < count; ++i) seeds[i] = first + i;
    return seeds;
}

}  // namespace

std::vector<CheckReport> run_verification_suite(VerifyLevel level, std::size_t max_threads) {
    const SuiteSettings s = level == VerifyLevel::quick ? SuiteSettings{10'000, 50}
                                                        : SuiteSettings{100'000, 100};

    auto shared_q = [] {
        RandomSource rng(101);
        return make_shared_curvature_quadratic(rng, 6, 40, 0.8);
    };
    auto het_q = [] {
        RandomSource rng(202);
        return make_heterogeneous_quadratic(rng, 5, 20, 10.0);
    };
    auto het_small = [] {
        RandomSource rng(303);
        return make_heterogeneous_quadratic(rng, 2, 4, 8.0);
    };
    auto logistic = [] {
        RandomSource rng(404);
        return make_synthetic_logistic(rng, 8, 60, 0.1);
    };
    auto stream_base = [] {
        RandomSource rng(505);
        return make_shared_curvature_quadratic(rng, 6, 64, 0.5);
    };

    auto descent_audit = [](const FiniteSumProblem& problem, std::uint64_t seed,
                            std::size_t states) {
        RandomSource rng(seed);
        const double L = problem.constants().smoothness;
        std::vector<CheckReport> reports;
        reports.reserve(states);
        for (std::size_t k = 0; k < states; ++k) {
            const Vector x = random_vector(rng, problem.dim(), 1.5);
            Vector g = problem.full_gradient(x);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += 0.7 * rng.normal();
            const double eta = rng.uniform(0.05, 1.0) / L;
            reports.push_back(check_descent_lemma(problem, x, g, eta));
        }
        return reports;
    };

    using Task = std::function<CheckReport()>;
    std::vector<Task> tasks;

    tasks.push_back([=] {
        RandomSource rng(11);
        return named(check_average_smoothness(*shared_q(), 100, rng),
                     "smoothness_shared_quadratic");
    });
    tasks.push_back([=] {
        RandomSource rng(12);
        return named(check_average_smoothness(*het_q(), 100, rng),
                     "smoothness_heterogeneous_quadratic");
    });
    tasks.push_back([=] {
        RandomSource rng(13);
        return named(check_average_smoothness(*logistic(), 100, rng), "smoothness_logistic");
    });
    tasks.push_back([=] {
        RandomSource rng(14);
        return named(check_bounded_variance(*shared_q(), 100, rng),
                     "variance_bound_shared_quadratic");
    });

    tasks.push_back([=] {
        return worst_of(descent_audit(*shared_q(), 21, 1000), "descent_shared_quadratic");
    });
    tasks.push_back([=] {
        return worst_of(descent_audit(*het_q(), 22, 1000), "descent_heterogeneous_quadratic");
    });
    tasks.push_back([=] {
        return worst_of(descent_audit(*logistic(), 23, 1000), "descent_logistic");
    });

    tasks.push_back([=] {
        auto problem = het_small();
        RandomSource rng(31);
        std::vector<CheckReport> reports;
        for (std::size_t k = 0; k < 100; ++k) {
            const Vector x_t = random_vector(rng, problem->dim(), 1.5);
            const Vector x_next = random_vector(rng, problem->dim(), 1.5);
            Vector g = problem->full_gradient(x_t);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += 0.6 * rng.normal();
            const double p = rng.uniform(0.1, 0.9);
            const std::size_t b_prime = 1 + k % 2;
            reports.push_back(
                check_variance_recursion_exact(*problem, g, x_t, x_next, p, b_prime));
        }
        return worst_of(reports, "variance_exact_heterogeneous");
    });

    auto online_variance_task = [=](std::size_t b, std::string name) {
        return Task([=] {
            auto base = stream_base();
            auto view = streaming_view(base, RandomSource(71));
            RandomSource rng(41 + b);
            const auto b_prime = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::sqrt(static_cast<double>(b))));
            const double p = theory::default_probability(b, b_prime);
            std::vector<CheckReport> reports;
            for (std::size_t k = 0; k < 3; ++k) {
                const Vector x_t = random_vector(rng, view->dim(), 1.0);
                const Vector x_next = random_vector(rng, view->dim(), 1.0);
                Vector g = view->full_gradient(x_t);
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += 0.5 * rng.normal();
                reports.push_back(check_variance_recursion_online(
                    *view, g, x_t, x_next, p, b, b_prime, s.mc_replicates, rng));
            }
            return worst_of(reports, name);
        });
    };
    tasks.push_back(online_variance_task(1, "variance_online_stream_b1"));
    tasks.push_back(online_variance_task(5, "variance_online_stream_b5"));
    tasks.push_back(online_variance_task(10, "variance_online_stream_b10"));

    tasks.push_back([=] {
        auto problem = het_q();
        RandomSource rng(51);
        const std::size_t n = problem->component_count();
        const Vector x_t = random_vector(rng, problem->dim(), 1.0);
        const Vector x_next = random_vector(rng, problem->dim(), 1.0);
        Vector g = problem->full_gradient(x_t);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += 0.5 * rng.normal();
        // b = n on a finite problem: the refresh is exact, no sigma^2 term
        return named(check_variance_recursion_online(*problem, g, x_t, x_next, 0.3, n, 4,
                                                     s.mc_replicates, rng),
                     "variance_online_finite_exact_refresh");
    });

    tasks.push_back([=] {
        auto problem = shared_q();
        RandomSource rng(61);
        const std::size_t n = problem->component_count();
        // b = n: the initial estimate is the exact gradient, Phi_0 = f(x0) - f*
        return named(check_phi0_bound(*problem, n, 0.5, 0.1, 100, rng), "phi0_finite_exact");
    });
    tasks.push_back([=] {
        auto base = stream_base();
        auto view = streaming_view(base, RandomSource(72));
        RandomSource rng(62);
        const double p = theory::default_probability(5, 2);
        const double eta = theory::stepsize_max(base->constants().smoothness, p, 2);
        return named(check_phi0_bound(*view, 5, p, eta, s.mc_replicates, rng),
                     "phi0_stream_b5");
    });
    tasks.push_back([=] {
        RandomSource make_rng(513);
        auto base = make_shared_curvature_quadratic(make_rng, 5, 32, 0.0);  // sigma^2 = 0
        auto view = streaming_view(base, RandomSource(73));
        RandomSource rng(63);
        return named(check_phi0_bound(*view, 1, 0.25, 0.2, 200, rng), "phi0_sigma_zero");
    });

    tasks.push_back([=] {
        auto problem = het_q();
        const double L = problem->constants().smoothness;
        PageConfig cfg;
        cfg.eta = 0.5 / L;
        cfg.params = {problem->component_count(), 1, 1.0};
        cfg.iters = 60;
        cfg.x0 = Vector(problem->dim());
        return named(check_lyapunov_telescoping(*problem, cfg, {1}), "lyapunov_gd_deterministic");
    });
    tasks.push_back([=] {
        auto problem = het_q();
        const PageConfig cfg = theory::auto_config(*problem, 0.25, theory::Mode::finite_sum,
                                                   Vector(problem->dim()));
        return named(check_lyapunov_telescoping(*problem, cfg, seed_range(1000, s.run_seeds)),
                     "lyapunov_finite_page");
    });
    tasks.push_back([=] {
        auto base = stream_base();
        auto view = streaming_view(base, RandomSource(74));
        const std::size_t b = 12, b_prime = 3;
        const double p = theory::default_probability(b, b_prime);
        PageConfig cfg;
        cfg.eta = theory::stepsize_max(base->constants().smoothness, p, b_prime);
        cfg.params = {b, b_prime, p};
        cfg.iters = 150;
        cfg.x0 = Vector(view->dim());
        return named(check_lyapunov_telescoping(*view, cfg, seed_range(2000, s.run_seeds)),
                     "lyapunov_online_page");
    });

    tasks.push_back([=] {
        auto problem = het_q();
        const double L = problem->constants().smoothness;
        PageConfig cfg;
        cfg.eta = 0.5 / L;
        cfg.params = {problem->component_count(), 1, 1.0};
        cfg.iters = 40;
        cfg.x0 = Vector(problem->dim());
        // a single deterministic run: one output, so mean == root-mean-square
        return named(check_jensen_output(*problem, cfg, {7}), "jensen_gd_equality");
    });
    tasks.push_back([=] {
        auto problem = het_q();
        const PageConfig cfg = theory::auto_config(*problem, 0.3, theory::Mode::finite_sum,
                                                   Vector(problem->dim()));
        return named(check_jensen_output(*problem, cfg, seed_range(3000, s.run_seeds)),
                     "jensen_page_heterogeneous");
    });

    std::vector<CheckReport> reports(tasks.size());
    parallel_for_index(tasks.size(), max_threads, [&](std::size_t i) { reports[i] = tasks[i](); });
    return reports;
}

}  // namespace pageopt
