#pragma once

#include <cstddef>
#include <vector>

#include "pageopt/random.hpp"
#include "pageopt/vector.hpp"

namespace pageopt {

// Small dense row-major matrix; just enough linear algebra for building the
// quadratic problem families and certifying their constants.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

    static Matrix identity(std::size_t d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }

    bool operator==(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && a_ == other.a_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

Vector matvec(const Matrix& m, const Vector& x);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
Matrix add_scaled(const Matrix& a, double alpha, const Matrix& b);  /* a + alpha*b */

/* x^T m x */
double quadratic_form(const Matrix& m, const Vector& x);

/* random orthogonal matrix: modified Gram-Schmidt on a Gaussian matrix */
Matrix random_orthogonal(RandomSource& rng, std::size_t d);

/* q * diag(eigs) * q^T, explicitly symmetrized */
Matrix symmetric_from_spectrum(const Matrix& q, const Vector& eigs);

// Largest eigenvalue of a symmetric positive semidefinite matrix by power
// iteration on a random starting vector; iterates until the Rayleigh quotient
// stagnates. Throws if the matrix is not square.
double power_iteration_lmax(const Matrix& m, RandomSource& rng,
                            std::size_t max_iters = 200000, double tol = 1e-14);

/* solve m x = rhs by Gaussian elimination with partial pivoting */
Vector solve_linear(Matrix m, Vector rhs);

}  // namespace pageopt
