#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace pageopt {

// Fixed-length dense real vector. Entries are validated to be finite when a
// vector is built from user-supplied values; arithmetic helpers that promise
// finite output re-check their result.
class Vector {
public:
    Vector() = default;

    explicit Vector(std::size_t d, double fill = 0.0) : e_(d, fill) {
        if (!std::isfinite(fill))
            throw std::invalid_argument("Vector: fill value must be finite");
    }

    Vector(std::initializer_list<double> values) : e_(values) { validate_finite(); }

    explicit Vector(std::vector<double> values) : e_(std::move(values)) { validate_finite(); }

    static Vector zeros(std::size_t d) { return Vector(d); }

    std::size_t size() const { return e_.size(); }
    bool empty() const { return e_.empty(); }

    double operator[](std::size_t i) const { return e_[i]; }
    double& operator[](std::size_t i) { return e_[i]; }

    double* data() { return e_.data(); }
    const double* data() const { return e_.data(); }

    auto begin() { return e_.begin(); }
    auto end() { return e_.end(); }
    auto begin() const { return e_.begin(); }
    auto end() const { return e_.end(); }

    const std::vector<double>& entries() const { return e_; }

    bool operator==(const Vector& other) const { return e_ == other.e_; }

    bool all_finite() const {
        for (double v : e_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    void validate_finite() const {
        if (!all_finite())
            throw std::invalid_argument("Vector: entries must be finite");
    }

    std::vector<double> e_;
};

inline void check_same_size(const Vector& a, const Vector& b, const char* who) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(who) + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
}

inline double dot(const Vector& a, const Vector& b) {
    check_same_size(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(const Vector& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i];
    return s;
}

inline double norm(const Vector& a) { return std::sqrt(norm_sq(a)); }

/* alpha*x + y; the result is checked to be finite */
inline Vector axpy(double alpha, const Vector& x, const Vector& y) {
    check_same_size(x, y, "axpy");
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = alpha * x[i] + y[i];
    if (!r.all_finite())
        throw std::domain_error("axpy: non-finite result");
    return r;
}

/* y += alpha*x, no finiteness check (inner-loop accumulation) */
inline void add_scaled(Vector& y, double alpha, const Vector& x) {
    check_same_size(x, y, "add_scaled");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vector operator+(const Vector& a, const Vector& b) {
    check_same_size(a, b, "operator+");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vector operator-(const Vector& a, const Vector& b) {
    check_same_size(a, b, "operator-");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vector operator*(double alpha, const Vector& a) {
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = alpha * a[i];
    return r;
}

// Running mean with the incremental update m += (v - m)/count. Averaging k
// copies of the same vector reproduces that vector bit-for-bit, which the
// zero-spread reduction tests rely on.
class MeanAccumulator {
public:
    explicit MeanAccumulator(std::size_t d) : mean_(d), count_(0) {}

    void add(const Vector& v) {
        check_same_size(v, mean_, "MeanAccumulator::add");
        ++count_;
        const double inv = 1.0 / static_cast<double>(count_);
        for (std::size_t i = 0; i < v.size(); ++i)
            mean_[i] += (v[i] - mean_[i]) * inv;
    }

    std::size_t count() const { return count_; }

    const Vector& mean() const {
        if (count_ == 0)
            throw std::logic_error("MeanAccumulator::mean: no samples");
        return mean_;
    }

private:
    Vector mean_;
    std::size_t count_;
};

}  // namespace pageopt
