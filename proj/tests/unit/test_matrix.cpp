#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "pageopt/matrix.hpp"
#include "pageopt/random.hpp"

#include "oracles.hpp"

using namespace pageopt;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t r = 0;
    for (const auto& row : rows) {
        std::size_t c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

}  // namespace

TEST_SUITE("matrix") {

TEST_CASE("matvec, matmul, transpose and quadratic form on frozen examples") {
    Matrix a = from_rows({{1.0, 2.0}, {3.0, 4.0}});
    CHECK(matvec(a, Vector{5.0, 6.0}) == Vector{17.0, 39.0});
    CHECK(matmul(a, a) == from_rows({{7.0, 10.0}, {15.0, 22.0}}));
    CHECK(transpose(a) == from_rows({{1.0, 3.0}, {2.0, 4.0}}));
    CHECK(add_scaled(a, 2.0, Matrix::identity(2)) == from_rows({{3.0, 2.0}, {3.0, 6.0}}));
    /* (1,1)^T A (1,1) = 1 + 2 + 3 + 4 */
    CHECK(quadratic_form(a, Vector{1.0, 1.0}) == 10.0);
    CHECK(matvec(Matrix::identity(3), Vector{1.0, -2.0, 3.0}) == Vector{1.0, -2.0, 3.0});
}

TEST_CASE("shape mismatches throw") {
    Matrix a(2, 3);
    CHECK_THROWS_AS(matvec(a, Vector{1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(matmul(a, a), std::invalid_argument);
    CHECK_THROWS_AS(quadratic_form(a, Vector{1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(add_scaled(a, 1.0, Matrix(3, 2)), std::invalid_argument);
}

TEST_CASE("random_orthogonal produces orthonormal columns") {
    RandomSource rng(21);
    for (std::size_t d : {2, 6, 12}) {
        Matrix q = random_orthogonal(rng, d);
        Matrix should_be_identity = matmul(transpose(q), q);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                CHECK(std::abs(should_be_identity(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("symmetric_from_spectrum is exactly symmetric with the right top eigenvalue") {
    RandomSource rng(22);
    Matrix q = random_orthogonal(rng, 4);
    Vector eigs{0.3, 1.7, 0.9, 1.1};
    Matrix m = symmetric_from_spectrum(q, eigs);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(m(i, j) == m(j, i));

    double lmax = power_iteration_lmax(m, rng);
    CHECK(lmax == doctest::Approx(1.7).epsilon(1e-10));
}

TEST_CASE("power iteration matches the planted spectrum") {
    RandomSource rng(23);
    Matrix q = random_orthogonal(rng, 3);
    Matrix m = symmetric_from_spectrum(q, Vector{0.5, 2.5, 1.2});
    CHECK(power_iteration_lmax(m, rng) == doctest::Approx(2.5).epsilon(1e-10));

    CHECK_THROWS_AS(power_iteration_lmax(Matrix(2, 3), rng), std::invalid_argument);
}

#ifdef PAGEOPT_HAVE_EIGEN
TEST_CASE("power iteration agrees with a dense eigensolver") {
    RandomSource rng(24);
    for (std::size_t d : {3, 8}) {
        Vector eigs(d);
        for (std::size_t i = 0; i < d; ++i) eigs[i] = rng.uniform(0.1, 3.0);
        Matrix m = symmetric_from_spectrum(random_orthogonal(rng, d), eigs);
        double ours = power_iteration_lmax(m, rng);
        double oracle = testsupport::eigen_lmax(m);
        CHECK(ours == doctest::Approx(oracle).epsilon(1e-8));
    }
}
#endif

TEST_CASE("solve_linear solves and flags singular systems") {
    Matrix a = from_rows({{2.0, 1.0}, {1.0, 3.0}});
    Vector x = solve_linear(a, Vector{3.0, 5.0});
    CHECK(x[0] == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(1.4).epsilon(1e-14));

    /* residual check on a bigger random SPD system */
    RandomSource rng(25);
    Vector eigs{1.0, 0.2, 3.0, 0.7, 1.5};
    Matrix m = symmetric_from_spectrum(random_orthogonal(rng, 5), eigs);
    Vector rhs = testsupport::random_vector(rng, 5);
    Vector sol = solve_linear(m, rhs);
    Vector residual = matvec(m, sol) - rhs;
    CHECK(norm(residual) < 1e-10);

    Matrix singular = from_rows({{1.0, 2.0}, {2.0, 4.0}});
    CHECK_THROWS_AS(solve_linear(singular, Vector{1.0, 1.0}), std::runtime_error);
    CHECK_THROWS_AS(solve_linear(Matrix(2, 3), Vector{1.0, 1.0}), std::invalid_argument);
}

}  // TEST_SUITE
