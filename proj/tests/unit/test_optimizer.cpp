#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pageopt/optimizer.hpp"
#include "pageopt/problems.hpp"
#include "pageopt/theory.hpp"

#include "oracles.hpp"

using namespace pageopt;

namespace {

/* elementwise the same update expression the optimizer uses */
Vector gd_oracle(const FiniteSumProblem& problem, Vector x, double eta, std::size_t steps) {
    for (std::size_t t = 0; t < steps; ++t) {
        const Vector g = problem.full_gradient(x);
        Vector next(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) next[i] = x[i] - eta * g[i];
        x = next;
    }
    return x;
}

bool bitwise_equal(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("full refresh every step reproduces deterministic gradient descent") {
    RandomSource rng(2100);
    auto prob = make_heterogeneous_quadratic(rng, 5, 12, 6.0);
    Vector x0 = testsupport::random_vector(rng, 5, 2.0);
    const double eta = 0.3;

    RunResult gd = run_gd(*prob, eta, 30, x0, 77);

    /* the trajectory is deterministic, so the reported iterate must equal the
       hand-rolled recursion advanced chosen_index times, bit for bit */
    Vector expected = gd_oracle(*prob, x0, eta, gd.chosen_index);
    CHECK(bitwise_equal(gd.x_hat, expected));

    /* explicit p = 1, b = n config is the same code path, same everything */
    PageConfig cfg;
    cfg.eta = eta;
    cfg.params = {12, 1, 1.0};
    cfg.iters = 30;
    cfg.seed = 77;
    cfg.x0 = x0;
    RunResult manual = run_page(*prob, cfg);
    CHECK(manual.chosen_index == gd.chosen_index);
    CHECK(bitwise_equal(manual.x_hat, gd.x_hat));
    CHECK(manual.oracle_calls == gd.oracle_calls);
    CHECK(manual.paper_calls == gd.paper_calls);
    CHECK(gd.oracle_calls == 12u * 31u); /* init refresh plus one per step */
    CHECK(gd.paper_calls == gd.oracle_calls);
    CHECK_FALSE(gd.aborted);
}

TEST_CASE("zero-spread components make single-sample sgd match gd bitwise") {
    RandomSource rng(2101);
    auto prob = make_shared_curvature_quadratic(rng, 4, 9, 0.0);
    Vector x0 = testsupport::random_vector(rng, 4, 1.5);
    const double eta = 0.4;

    RunResult gd = run_gd(*prob, eta, 25, x0, 5, 1);
    RunResult sgd = run_sgd(*prob, eta, 1, 25, x0, 5, 1);

    CHECK(gd.chosen_index == sgd.chosen_index);
    CHECK(bitwise_equal(gd.x_hat, sgd.x_hat));
    REQUIRE(gd.trace.size() == sgd.trace.size());
    for (std::size_t t = 0; t < gd.trace.size(); ++t) {
        REQUIRE(gd.trace[t].f_val.has_value());
        CHECK(*gd.trace[t].f_val == *sgd.trace[t].f_val);
        CHECK(*gd.trace[t].grad_norm_sq == *sgd.trace[t].grad_norm_sq);
        CHECK(*sgd.trace[t].est_err_sq == 0.0);
    }
    /* only the accounting differs: one draw per step instead of n */
    CHECK(sgd.paper_calls == 1u + 25u);
    CHECK(gd.paper_calls == 9u * 26u);
}

TEST_CASE("zero stepsize keeps the iterate pinned at the start") {
    RandomSource rng(2102);
    auto prob = make_heterogeneous_quadratic(rng, 3, 8, 4.0);
    Vector x0 = testsupport::random_vector(rng, 3, 1.0);

    PageConfig cfg;
    cfg.eta = 0.0;
    cfg.params = {8, 2, 0.3};
    cfg.iters = 15;
    cfg.seed = 11;
    cfg.x0 = x0;
    cfg.diagnostics_interval = 1;
    RunResult res = run_page(*prob, cfg);

    CHECK(bitwise_equal(res.x_hat, x0));
    const double f0 = prob->value(x0);
    for (const auto& rec : res.trace) CHECK(*rec.f_val == f0);
    CHECK_FALSE(res.aborted);
}

TEST_CASE("identical configs replay bitwise, including streaming problems") {
    RandomSource rng(2103);
    auto base = make_shared_curvature_quadratic(rng, 4, 30, 1.5);
    Vector x0 = testsupport::random_vector(rng, 4, 2.0);

    PageConfig cfg;
    cfg.eta = 0.2;
    cfg.params = {10, 3, 0.25};
    cfg.iters = 40;
    cfg.seed = 999;
    cfg.x0 = x0;
    cfg.diagnostics_interval = 4;

    RunResult a = run_page(*base, cfg);
    RunResult b = run_page(*base, cfg);
    CHECK(a.chosen_index == b.chosen_index);
    CHECK(bitwise_equal(a.x_hat, b.x_hat));
    CHECK(a.oracle_calls == b.oracle_calls);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t t = 0; t < a.trace.size(); ++t) {
        CHECK(a.trace[t].branch == b.trace[t].branch);
        CHECK(a.trace[t].f_val == b.trace[t].f_val);
        CHECK(a.trace[t].est_err_sq == b.trace[t].est_err_sq);
    }

    auto view = streaming_view(base, RandomSource(1));
    PageConfig online = cfg;
    online.params = {10, 3, 0.25};
    RunResult s1 = run_page(*view, online);
    RunResult s2 = run_page(*view, online); /* reseeds the stream itself */
    CHECK(s1.chosen_index == s2.chosen_index);
    CHECK(bitwise_equal(s1.x_hat, s2.x_hat));
    for (std::size_t t = 0; t < s1.trace.size(); ++t)
        CHECK(s1.trace[t].branch == s2.trace[t].branch);

    /* a different seed must at least pick a different coin sequence somewhere */
    PageConfig other = cfg;
    other.seed = 1000;
    RunResult c = run_page(*base, other);
    bool any_diff = c.chosen_index != a.chosen_index;
    for (std::size_t t = 0; !any_diff && t < c.trace.size(); ++t)
        any_diff = c.trace[t].branch != a.trace[t].branch;
    CHECK(any_diff);
}

TEST_CASE("oversized stepsizes trip the divergence guard") {
    RandomSource rng(2104);
    auto prob = make_heterogeneous_quadratic(rng, 4, 10, 3.0);
    Vector x0 = testsupport::random_vector(rng, 4, 1.0);

    RunResult res = run_gd(*prob, 1e9, 60, x0, 3);
    CHECK(res.aborted);
    REQUIRE(res.abort_iteration.has_value());
    CHECK(*res.abort_iteration >= 1);
    CHECK(*res.abort_iteration <= 60);
    /* records stop at the offending step */
    CHECK(res.trace.size() <= *res.abort_iteration + 1);
    CHECK(res.trace.size() >= *res.abort_iteration);
    CHECK(std::isfinite(norm(res.x_hat)));

    /* an absurd starting objective aborts at the very first diagnostic */
    Vector far(4);
    for (std::size_t i = 0; i < 4; ++i) far[i] = 1e13;
    RunResult at_start = run_gd(*prob, 0.1, 5, far, 3, 1);
    CHECK(at_start.aborted);
    REQUIRE(at_start.abort_iteration.has_value());
    CHECK(*at_start.abort_iteration == 0);
    CHECK(at_start.trace.size() == 1);
}

TEST_CASE("reported index is uniform over the horizon") {
    RandomSource rng(2105);
    auto prob = make_shared_curvature_quadratic(rng, 1, 2, 0.5);
    Vector x0{1.0};

    const std::size_t T = 10;
    const int reps = 5000;
    std::vector<int> counts(T, 0);
    for (int s = 0; s < reps; ++s) {
        PageConfig cfg;
        cfg.eta = 0.0;
        cfg.params = {2, 1, 0.5};
        cfg.iters = T;
        cfg.seed = 40000 + static_cast<std::uint64_t>(s);
        cfg.x0 = x0;
        counts[run_page(*prob, cfg).chosen_index] += 1;
    }
    const double expected = static_cast<double>(reps) / static_cast<double>(T);
    double chi_sq = 0.0;
    for (int c : counts) {
        const double diff = static_cast<double>(c) - expected;
        chi_sq += diff * diff / expected;
    }
    CHECK(chi_sq < testsupport::kChiSq99Df9);
}

TEST_CASE("trace covers every step and flags the right records") {
    RandomSource rng(2106);
    auto prob = make_heterogeneous_quadratic(rng, 4, 20, 5.0);
    Vector x0 = testsupport::random_vector(rng, 4, 2.0);

    PageConfig cfg;
    cfg.eta = theory::stepsize_max(prob->constants().smoothness, 0.2, 4);
    cfg.params = {20, 4, 0.2};
    cfg.iters = 25;
    cfg.seed = 8;
    cfg.x0 = x0;
    cfg.diagnostics_interval = 7;
    RunResult res = run_page(*prob, cfg);

    REQUIRE(res.trace.size() == 26);
    CHECK(res.trace[0].branch == Branch::init);
    std::uint64_t prev_oracle = 0;
    std::uint64_t prev_paper = 0;
    for (std::size_t t = 0; t < res.trace.size(); ++t) {
        const auto& rec = res.trace[t];
        CHECK(rec.t == t);
        if (t > 0) CHECK((rec.branch == Branch::big || rec.branch == Branch::small));
        const bool expect_diag = (t % 7 == 0) || t == res.chosen_index;
        CHECK(rec.f_val.has_value() == expect_diag);
        CHECK(rec.grad_norm_sq.has_value() == expect_diag);
        CHECK(rec.est_err_sq.has_value() == expect_diag);
        /* this family certifies f*, so the potential comes along with them */
        CHECK(rec.lyapunov.has_value() == expect_diag);
        CHECK(rec.oracle_calls >= prev_oracle);
        CHECK(rec.paper_calls >= prev_paper);
        prev_oracle = rec.oracle_calls;
        prev_paper = rec.paper_calls;
    }
    CHECK(res.trace[res.chosen_index].f_val.has_value());
    CHECK(res.trace.back().oracle_calls == res.oracle_calls);
    CHECK(res.trace.back().paper_calls == res.paper_calls);
}

TEST_CASE("per-step objective drop obeys the smoothness inequality on a real run") {
    RandomSource rng(2107);
    auto prob = make_shared_curvature_quadratic(rng, 6, 30, 2.0);
    Vector x0 = testsupport::random_vector(rng, 6, 3.0);
    const double l = prob->constants().smoothness;
    const double p = theory::default_probability(30, 5);
    const double eta = theory::stepsize_max(l, p, 5);

    PageConfig cfg;
    cfg.eta = eta;
    cfg.params = {30, 5, p};
    cfg.iters = 40;
    cfg.seed = 21;
    cfg.x0 = x0;
    cfg.diagnostics_interval = 1;
    RunResult res = run_page(*prob, cfg);
    REQUIRE_FALSE(res.aborted);

    /* f(x - eta g) <= f(x) - eta/2 ||grad f||^2 + eta/2 ||g - grad f||^2
       whenever eta <= 1/L; the dropped quadratic term only helps */
    REQUIRE(eta <= 1.0 / l);
    for (std::size_t t = 0; t + 1 < res.trace.size(); ++t) {
        const double f_t = *res.trace[t].f_val;
        const double bound = f_t - 0.5 * eta * *res.trace[t].grad_norm_sq +
                             0.5 * eta * *res.trace[t].est_err_sq;
        CHECK(*res.trace[t + 1].f_val <= bound + 1e-9 * (1.0 + std::abs(f_t)));
    }
}

TEST_CASE("omitted start point means the origin") {
    RandomSource rng(2108);
    auto prob = make_heterogeneous_quadratic(rng, 3, 7, 2.0);

    PageConfig cfg;
    cfg.eta = 0.1;
    cfg.params = {7, 2, 0.4};
    cfg.iters = 12;
    cfg.seed = 6;
    RunResult implicit = run_page(*prob, cfg);
    cfg.x0 = Vector(3);
    RunResult explicit_zero = run_page(*prob, cfg);
    CHECK(bitwise_equal(implicit.x_hat, explicit_zero.x_hat));
    CHECK(implicit.chosen_index == explicit_zero.chosen_index);
}

TEST_CASE("config validation rejects bad runs up front") {
    RandomSource rng(2109);
    auto base = make_shared_curvature_quadratic(rng, 3, 5, 1.0);
    Vector x0(3);

    PageConfig cfg;
    cfg.eta = 0.1;
    cfg.params = {5, 1, 0.5};
    cfg.iters = 4;
    cfg.x0 = x0;

    PageConfig bad = cfg;
    bad.eta = -0.1;
    CHECK_THROWS_AS(run_page(*base, bad), std::invalid_argument);
    bad = cfg;
    bad.eta = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(run_page(*base, bad), std::invalid_argument);
    bad = cfg;
    bad.iters = 0;
    CHECK_THROWS_AS(run_page(*base, bad), std::invalid_argument);
    bad = cfg;
    bad.x0 = Vector(4);
    CHECK_THROWS_AS(run_page(*base, bad), std::invalid_argument);
    bad = cfg;
    bad.epsilon = -1.0;
    CHECK_THROWS_AS(run_page(*base, bad), std::invalid_argument);
    bad = cfg;
    bad.params = {6, 1, 0.5}; /* refresh batch larger than the component pool */
    CHECK_THROWS_AS(run_page(*base, bad), std::invalid_argument);

    auto view = streaming_view(base, RandomSource(2));
    CHECK_THROWS_AS(run_gd(*view, 0.1, 3, x0), std::invalid_argument);
}

}  // TEST_SUITE
