#include "pageopt/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace pageopt {

Matrix Matrix::identity(std::size_t d) {
    Matrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
}

Vector matvec(const Matrix& m, const Vector& x) {
    if (m.cols() != x.size())
        throw std::invalid_argument("matvec: dimension mismatch");
    Vector r(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
        r[i] = s;
    }
    return r;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: dimension mismatch");
    Matrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

Matrix transpose(const Matrix& m) {
    Matrix r(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(j, i) = m(i, j);
    return r;
}

Matrix add_scaled(const Matrix& a, double alpha, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("add_scaled: dimension mismatch");
    Matrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + alpha * b(i, j);
    return r;
}

double quadratic_form(const Matrix& m, const Vector& x) {
    return dot(x, matvec(m, x));
}

Matrix random_orthogonal(RandomSource& rng, std::size_t d) {
    if (d == 0)
        throw std::invalid_argument("random_orthogonal: d must be positive");
    // columns of g orthonormalized by modified Gram-Schmidt, with one
    // re-orthogonalization pass to keep q^T q - I near machine precision
    Matrix q(d, d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i) q(i, j) = rng.normal();
    for (std::size_t j = 0; j < d; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                double proj = 0.0;
                for (std::size_t i = 0; i < d; ++i) proj += q(i, k) * q(i, j);
                for (std::size_t i = 0; i < d; ++i) q(i, j) -= proj * q(i, k);
            }
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < d; ++i) nrm += q(i, j) * q(i, j);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-12)
            throw std::runtime_error("random_orthogonal: degenerate column");
        for (std::size_t i = 0; i < d; ++i) q(i, j) /= nrm;
    }
    return q;
}

Matrix symmetric_from_spectrum(const Matrix& q, const Vector& eigs) {
    const std::size_t d = q.rows();
    if (q.cols() != d || eigs.size() != d)
        throw std::invalid_argument("symmetric_from_spectrum: dimension mismatch");
    Matrix scaled = q;
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i) scaled(i, j) *= eigs[j];
    Matrix m = matmul(scaled, transpose(q));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            const double avg = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = avg;
            m(j, i) = avg;
        }
    return m;
}

double power_iteration_lmax(const Matrix& m, RandomSource& rng,
                            std::size_t max_iters, double tol) {
    const std::size_t d = m.rows();
    if (m.cols() != d || d == 0)
        throw std::invalid_argument("power_iteration_lmax: matrix must be square");
    Vector v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = rng.normal();
    double nrm = norm(v);
    if (nrm == 0.0) v[0] = 1.0, nrm = 1.0;
    for (std::size_t i = 0; i < d; ++i) v[i] /= nrm;

    double lambda = 0.0;
    std::size_t stagnant = 0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        Vector w = matvec(m, v);
        const double next = dot(v, w);
        const double wn = norm(w);
        if (wn == 0.0) return 0.0;  // v in the null space: spectrum is {0} along it
        for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / wn;
        if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
            if (++stagnant >= 3) return next;
        } else {
            stagnant = 0;
        }
        lambda = next;
    }
    return lambda;
}

Vector solve_linear(Matrix m, Vector rhs) {
    const std::size_t d = m.rows();
    if (m.cols() != d || rhs.size() != d)
        throw std::invalid_argument("solve_linear: dimension mismatch");
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
        if (std::abs(m(pivot, col)) < 1e-300)
            throw std::runtime_error("solve_linear: matrix is singular");
        if (pivot != col) {
            for (std::size_t j = 0; j < d; ++j) std::swap(m(col, j), m(pivot, j));
            std::swap(rhs[col], rhs[pivot]);
        }
        for (std::size_t r = col + 1; r < d; ++r) {
            const double factor = m(r, col) / m(col, col);
            if (factor == 0.0) continue;
            for (std::size_t j = col; j < d; ++j) m(r, j) -= factor * m(col, j);
            rhs[r] -= factor * rhs[col];
        }
    }
    Vector x(d);
    for (std::size_t i = d; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t j = i + 1; j < d; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

}  // namespace pageopt
