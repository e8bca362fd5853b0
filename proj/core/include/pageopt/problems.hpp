#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pageopt/matrix.hpp"
#include "pageopt/problem.hpp"
#include "pageopt/random.hpp"

namespace pageopt {

// f_i(x) = 0.5 x^T A x - b_i^T x with one curvature matrix A shared by all
// components. Every certified constant is exact: L = lmax(A), sigma^2 is the
// actual mean squared deviation of the b_i, and f* comes from solving the
// normal equations of the averaged objective.
class SharedCurvatureQuadratic final : public FiniteSumProblem {
public:
    // When lmax is supplied the caller vouches for it (analytic certificate);
    // otherwise it is certified by power iteration.
    SharedCurvatureQuadratic(Matrix a, std::vector<Vector> offsets,
                             std::optional<double> lmax = std::nullopt);

    std::size_t dim() const override { return dim_; }
    std::size_t component_count() const override { return offsets_.size(); }
    double value(const Vector& x) const override;
    Vector full_gradient(const Vector& x) const override;
    double component_value(std::size_t i, const Vector& x) const override;
    Vector component_gradient(std::size_t i, const Vector& x) const override;
    const ProblemConstants& constants() const override { return constants_; }
    std::optional<Vector> minimizer() const override { return x_star_; }

    const Matrix& curvature() const { return a_; }
    const Vector& offset_mean() const { return offset_mean_; }

private:
    Matrix a_;
    std::vector<Vector> offsets_;
    Vector offset_mean_;
    Vector x_star_;
    ProblemConstants constants_;
    std::size_t dim_;
};

// Random instance: curvature with a known spectrum (exact L), offsets
// b_i = b_mean + spread * noise_i. spread = 0 makes every component identical
// and certifies sigma^2 = 0 exactly.
std::shared_ptr<SharedCurvatureQuadratic> make_shared_curvature_quadratic(
    RandomSource& rng, std::size_t d, std::size_t n, double spread);

// f_i(x) = 0.5 x^T A_i x - b_i^T x with per-component curvature. The tight
// mean-squared smoothness constant L = sqrt(lmax((1/n) sum A_i^2)) is
// certified by power iteration; sigma^2 has no uniform bound and is absent.
class HeterogeneousQuadratic final : public FiniteSumProblem {
public:
    HeterogeneousQuadratic(std::vector<Matrix> curvatures, std::vector<Vector> offsets);

    std::size_t dim() const override { return dim_; }
    std::size_t component_count() const override { return curvatures_.size(); }
    double value(const Vector& x) const override;
    Vector full_gradient(const Vector& x) const override;
    double component_value(std::size_t i, const Vector& x) const override;
    Vector component_gradient(std::size_t i, const Vector& x) const override;
    const ProblemConstants& constants() const override { return constants_; }
    std::optional<Vector> minimizer() const override { return x_star_; }

    /* the same family with every A_i and b_i multiplied by factor > 0 */
    std::shared_ptr<HeterogeneousQuadratic> scaled(double factor) const;

private:
    std::vector<Matrix> curvatures_;
    std::vector<Vector> offsets_;
    Matrix curvature_mean_;
    Vector offset_mean_;
    Vector x_star_;
    ProblemConstants constants_;
    std::size_t dim_;
};

// Random instance; per-component eigenvalues lie in [1/condition, 1].
std::shared_ptr<HeterogeneousQuadratic> make_heterogeneous_quadratic(
    RandomSource& rng, std::size_t d, std::size_t n, double condition);

// Binary logistic loss with a smooth nonconvex regularizer:
//   f_i(x) = log(1 + exp(-y_i a_i^T x)) + lambda * sum_j x_j^2 / (1 + x_j^2).
// L is an analytic upper bound, sqrt((1/n) sum (||a_i||^2/4 + 2 lambda)^2);
// neither sigma^2 nor f* is certified.
class NonconvexLogistic final : public FiniteSumProblem {
public:
    NonconvexLogistic(std::vector<Vector> features, std::vector<double> labels, double lambda);

    std::size_t dim() const override { return dim_; }
    std::size_t component_count() const override { return features_.size(); }
    double value(const Vector& x) const override;
    Vector full_gradient(const Vector& x) const override;
    double component_value(std::size_t i, const Vector& x) const override;
    Vector component_gradient(std::size_t i, const Vector& x) const override;
    const ProblemConstants& constants() const override { return constants_; }

private:
    std::vector<Vector> features_;
    std::vector<double> labels_;
    double lambda_;
    ProblemConstants constants_;
    std::size_t dim_;
};

std::shared_ptr<NonconvexLogistic> make_nonconvex_logistic(std::vector<Vector> features,
                                                           std::vector<double> labels,
                                                           double lambda);

/* Gaussian features, labels planted from a random separator with 10% flips */
std::shared_ptr<NonconvexLogistic> make_synthetic_logistic(RandomSource& rng, std::size_t d,
                                                           std::size_t n, double lambda);

/* rows "label,feat1,...,featd" with label in {-1,+1} */
std::shared_ptr<NonconvexLogistic> load_logistic_csv(const std::string& path, double lambda);

// Streaming (online) view over a finite base problem: each component access
// draws a fresh index from the view's own random source, so the index argument
// of component_gradient is ignored. Requires a certified sigma^2 on the base.
// The view owns its sampling stream; it must not be shared across concurrent
// runs (build one view per worker instead).
class StreamingView final : public FiniteSumProblem {
public:
    StreamingView(std::shared_ptr<const FiniteSumProblem> base, RandomSource rng);

    std::size_t dim() const override { return base_->dim(); }
    std::size_t component_count() const override { return base_->component_count(); }
    bool streaming() const override { return true; }
    double value(const Vector& x) const override { return base_->value(x); }
    /* exact gradient of the base average; diagnostics only, never sampled */
    Vector full_gradient(const Vector& x) const override { return base_->full_gradient(x); }
    double component_value(std::size_t i, const Vector& x) const override {
        return base_->component_value(i, x);
    }
    Vector component_gradient(std::size_t /*ignored*/, const Vector& x) const override;
    Vector component_gradient_diff(std::size_t /*ignored*/, const Vector& x_new,
                                   const Vector& x_old) const override;
    const ProblemConstants& constants() const override { return base_->constants(); }
    std::optional<Vector> minimizer() const override { return base_->minimizer(); }
    void reset_stream(std::uint64_t seed) const override;

private:
    std::shared_ptr<const FiniteSumProblem> base_;
    mutable RandomSource rng_;
};

std::shared_ptr<StreamingView> streaming_view(std::shared_ptr<const FiniteSumProblem> base,
                                              RandomSource rng);

}  // namespace pageopt
