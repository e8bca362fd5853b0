#include "pageopt/problems.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace pageopt {

namespace {

Vector mean_of(const std::vector<Vector>& vs) {
    if (vs.empty())
        throw std::invalid_argument("problem construction: needs at least one component");
    MeanAccumulator acc(vs.front().size());
    for (const auto& v : vs) acc.add(v);
    return acc.mean();
}

double mean_sq_deviation(const std::vector<Vector>& vs, const Vector& center) {
    double s = 0.0;
    for (const auto& v : vs) s += norm_sq(v - center);
    return s / static_cast<double>(vs.size());
}

}  // namespace

/* ---------------- shared-curvature quadratic ---------------- */

SharedCurvatureQuadratic::SharedCurvatureQuadratic(Matrix a, std::vector<Vector> offsets,
                                                   std::optional<double> lmax)
    : a_(std::move(a)), offsets_(std::move(offsets)), dim_(a_.rows()) {
    if (a_.cols() != dim_ || dim_ == 0)
        throw std::invalid_argument("SharedCurvatureQuadratic: curvature must be square");
    for (const auto& b : offsets_)
        if (b.size() != dim_)
            throw std::invalid_argument("SharedCurvatureQuadratic: offset dimension mismatch");
    offset_mean_ = mean_of(offsets_);
    double l;
    if (lmax) {
        l = *lmax;
        constants_.how_certified = Certification::analytic;
    } else {
        RandomSource rng(0x5eed);
        l = power_iteration_lmax(a_, rng);
        constants_.how_certified = Certification::computed_by_oracle;
    }
    if (!(l > 0.0))
        throw std::invalid_argument("SharedCurvatureQuadratic: curvature must be positive definite");
    x_star_ = solve_linear(a_, offset_mean_);
    constants_.smoothness = l;
    constants_.variance_bound = mean_sq_deviation(offsets_, offset_mean_);
    constants_.optimal_value = value(x_star_);
}

double SharedCurvatureQuadratic::value(const Vector& x) const {
    return 0.5 * quadratic_form(a_, x) - dot(offset_mean_, x);
}

Vector SharedCurvatureQuadratic::full_gradient(const Vector& x) const {
    return matvec(a_, x) - offset_mean_;
}

double SharedCurvatureQuadratic::component_value(std::size_t i, const Vector& x) const {
    return 0.5 * quadratic_form(a_, x) - dot(offsets_.at(i), x);
}

Vector SharedCurvatureQuadratic::component_gradient(std::size_t i, const Vector& x) const {
    return matvec(a_, x) - offsets_.at(i);
}

std::shared_ptr<SharedCurvatureQuadratic> make_shared_curvature_quadratic(
    RandomSource& rng, std::size_t d, std::size_t n, double spread) {
    if (d == 0 || n == 0)
        throw std::invalid_argument("make_shared_curvature_quadratic: d and n must be positive");
    if (spread < 0.0)
        throw std::invalid_argument("make_shared_curvature_quadratic: spread must be >= 0");
    Vector eigs(d);
    double lmax = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        eigs[i] = rng.uniform(0.5, 2.0);
        lmax = std::max(lmax, eigs[i]);
    }
    Matrix a = symmetric_from_spectrum(random_orthogonal(rng, d), eigs);
    Vector center(d);
    for (std::size_t i = 0; i < d; ++i) center[i] = rng.normal();
    std::vector<Vector> offsets;
    offsets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vector b = center;
        for (std::size_t j = 0; j < d; ++j) b[j] += spread * rng.normal();
        offsets.push_back(std::move(b));
    }
    return std::make_shared<SharedCurvatureQuadratic>(std::move(a), std::move(offsets), lmax);
}

/* ---------------- heterogeneous quadratic ---------------- */

HeterogeneousQuadratic::HeterogeneousQuadratic(std::vector<Matrix> curvatures,
                                               std::vector<Vector> offsets)
    : curvatures_(std::move(curvatures)), offsets_(std::move(offsets)) {
    if (curvatures_.empty() || curvatures_.size() != offsets_.size())
        throw std::invalid_argument("HeterogeneousQuadratic: need matching, nonempty component lists");
    dim_ = curvatures_.front().rows();
    const auto n = curvatures_.size();
    Matrix gram_mean(dim_, dim_);
    curvature_mean_ = Matrix(dim_, dim_);
    for (std::size_t i = 0; i < n; ++i) {
        const Matrix& ai = curvatures_[i];
        if (ai.rows() != dim_ || ai.cols() != dim_ || offsets_[i].size() != dim_)
            throw std::invalid_argument("HeterogeneousQuadratic: component dimension mismatch");
        curvature_mean_ = add_scaled(curvature_mean_, 1.0, ai);
        gram_mean = add_scaled(gram_mean, 1.0, matmul(ai, ai));
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    curvature_mean_ = add_scaled(Matrix(dim_, dim_), inv_n, curvature_mean_);
    gram_mean = add_scaled(Matrix(dim_, dim_), inv_n, gram_mean);
    offset_mean_ = mean_of(offsets_);

    RandomSource rng(0x5eed);
    const double lmax_gram = power_iteration_lmax(gram_mean, rng);
    constants_.smoothness = std::sqrt(lmax_gram);
    constants_.how_certified = Certification::computed_by_oracle;
    try {
        x_star_ = solve_linear(curvature_mean_, offset_mean_);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("HeterogeneousQuadratic: averaged system is singular");
    }
    constants_.optimal_value = value(x_star_);
}

double HeterogeneousQuadratic::value(const Vector& x) const {
    return 0.5 * quadratic_form(curvature_mean_, x) - dot(offset_mean_, x);
}

Vector HeterogeneousQuadratic::full_gradient(const Vector& x) const {
    return matvec(curvature_mean_, x) - offset_mean_;
}

double HeterogeneousQuadratic::component_value(std::size_t i, const Vector& x) const {
    return 0.5 * quadratic_form(curvatures_.at(i), x) - dot(offsets_.at(i), x);
}

Vector HeterogeneousQuadratic::component_gradient(std::size_t i, const Vector& x) const {
    return matvec(curvatures_.at(i), x) - offsets_.at(i);
}

std::shared_ptr<HeterogeneousQuadratic> HeterogeneousQuadratic::scaled(double factor) const {
    if (!(factor > 0.0))
        throw std::invalid_argument("HeterogeneousQuadratic::scaled: factor must be positive");
    std::vector<Matrix> as;
    std::vector<Vector> bs;
    as.reserve(curvatures_.size());
    bs.reserve(offsets_.size());
    for (const auto& a : curvatures_) as.push_back(add_scaled(Matrix(dim_, dim_), factor, a));
    for (const auto& b : offsets_) bs.push_back(factor * b);
    return std::make_shared<HeterogeneousQuadratic>(std::move(as), std::move(bs));
}

std::shared_ptr<HeterogeneousQuadratic> make_heterogeneous_quadratic(
    RandomSource& rng, std::size_t d, std::size_t n, double condition) {
    if (d == 0 || n < 2)
        throw std::invalid_argument("make_heterogeneous_quadratic: need d >= 1 and n >= 2");
    if (condition < 1.0)
        throw std::invalid_argument("make_heterogeneous_quadratic: condition must be >= 1");
    std::vector<Matrix> as;
    std::vector<Vector> bs;
    as.reserve(n);
    bs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vector eigs(d);
        for (std::size_t j = 0; j < d; ++j) eigs[j] = rng.uniform(1.0 / condition, 1.0);
        as.push_back(symmetric_from_spectrum(random_orthogonal(rng, d), eigs));
        Vector b(d);
        for (std::size_t j = 0; j < d; ++j) b[j] = rng.normal();
        bs.push_back(std::move(b));
    }
    return std::make_shared<HeterogeneousQuadratic>(std::move(as), std::move(bs));
}

/* ---------------- nonconvex logistic ---------------- */

namespace {

/* log(1 + exp(-t)) without overflow */
double softplus_neg(double t) {
    if (t > 0.0) return std::log1p(std::exp(-t));
    return -t + std::log1p(std::exp(t));
}

/* d/dt log(1 + exp(-t)) = -1 / (1 + exp(t)) */
double logistic_slope(double t) {
    return -1.0 / (1.0 + std::exp(t));
}

}  // namespace

NonconvexLogistic::NonconvexLogistic(std::vector<Vector> features, std::vector<double> labels,
                                     double lambda)
    : features_(std::move(features)), labels_(std::move(labels)), lambda_(lambda) {
    if (features_.empty())
        throw std::invalid_argument("NonconvexLogistic: empty dataset");
    if (features_.size() != labels_.size())
        throw std::invalid_argument("NonconvexLogistic: feature/label count mismatch");
    if (lambda_ < 0.0)
        throw std::invalid_argument("NonconvexLogistic: lambda must be >= 0");
    dim_ = features_.front().size();
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < features_.size(); ++i) {
        if (features_[i].size() != dim_)
            throw std::invalid_argument("NonconvexLogistic: inconsistent feature dimension");
        if (labels_[i] != 1.0 && labels_[i] != -1.0)
            throw std::invalid_argument("NonconvexLogistic: labels must be +1 or -1");
        const double li = 0.25 * norm_sq(features_[i]) + 2.0 * lambda_;
        sq_sum += li * li;
    }
    // component gradients are (||a_i||^2/4 + 2 lambda)-Lipschitz, so the root
    // mean square of those constants bounds the mean-squared smoothness
    constants_.smoothness = std::sqrt(sq_sum / static_cast<double>(features_.size()));
    constants_.how_certified = Certification::analytic;
}

double NonconvexLogistic::component_value(std::size_t i, const Vector& x) const {
    const double t = labels_.at(i) * dot(features_.at(i), x);
    double reg = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double xj2 = x[j] * x[j];
        reg += xj2 / (1.0 + xj2);
    }
    return softplus_neg(t) + lambda_ * reg;
}

Vector NonconvexLogistic::component_gradient(std::size_t i, const Vector& x) const {
    const double y = labels_.at(i);
    const Vector& a = features_.at(i);
    const double t = y * dot(a, x);
    const double coeff = logistic_slope(t) * y;
    Vector g(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
        const double denom = 1.0 + x[j] * x[j];
        g[j] = coeff * a[j] + lambda_ * 2.0 * x[j] / (denom * denom);
    }
    return g;
}

double NonconvexLogistic::value(const Vector& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < features_.size(); ++i) s += component_value(i, x);
    return s / static_cast<double>(features_.size());
}

Vector NonconvexLogistic::full_gradient(const Vector& x) const {
    MeanAccumulator acc(dim_);
    for (std::size_t i = 0; i < features_.size(); ++i) acc.add(component_gradient(i, x));
    return acc.mean();
}

std::shared_ptr<NonconvexLogistic> make_nonconvex_logistic(std::vector<Vector> features,
                                                           std::vector<double> labels,
                                                           double lambda) {
    return std::make_shared<NonconvexLogistic>(std::move(features), std::move(labels), lambda);
}

std::shared_ptr<NonconvexLogistic> make_synthetic_logistic(RandomSource& rng, std::size_t d,
                                                           std::size_t n, double lambda) {
    if (d == 0 || n == 0)
        throw std::invalid_argument("make_synthetic_logistic: d and n must be positive");
    Vector separator(d);
    for (std::size_t j = 0; j < d; ++j) separator[j] = rng.normal();
    std::vector<Vector> features;
    std::vector<double> labels;
    features.reserve(n);
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vector a(d);
        for (std::size_t j = 0; j < d; ++j) a[j] = rng.normal();
        double y = dot(a, separator) >= 0.0 ? 1.0 : -1.0;
        if (rng.uniform01() < 0.1) y = -y;  // label noise keeps the data nonseparable
        features.push_back(std::move(a));
        labels.push_back(y);
    }
    return make_nonconvex_logistic(std::move(features), std::move(labels), lambda);
}

std::shared_ptr<NonconvexLogistic> load_logistic_csv(const std::string& path, double lambda) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_logistic_csv: cannot open " + path);
    std::vector<Vector> features;
    std::vector<double> labels;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ','))
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("load_logistic_csv: bad number at line " +
                                         std::to_string(lineno));
            }
        if (row.size() < 2)
            throw std::runtime_error("load_logistic_csv: line " + std::to_string(lineno) +
                                     " needs a label and at least one feature");
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw std::runtime_error("load_logistic_csv: inconsistent column count at line " +
                                     std::to_string(lineno));
        const double label = row.front();
        if (label != 1.0 && label != -1.0)
            throw std::runtime_error("load_logistic_csv: label must be +1 or -1 at line " +
                                     std::to_string(lineno));
        labels.push_back(label);
        features.emplace_back(std::vector<double>(row.begin() + 1, row.end()));
    }
    if (features.empty())
        throw std::runtime_error("load_logistic_csv: empty dataset in " + path);
    return make_nonconvex_logistic(std::move(features), std::move(labels), lambda);
}

/* ---------------- streaming view ---------------- */

StreamingView::StreamingView(std::shared_ptr<const FiniteSumProblem> base, RandomSource rng)
    : base_(std::move(base)), rng_(rng) {
    if (!base_)
        throw std::invalid_argument("StreamingView: null base problem");
    if (base_->streaming())
        throw std::invalid_argument("StreamingView: base is already streaming");
    if (!base_->constants().variance_bound)
        throw std::invalid_argument("StreamingView: base problem has no certified sigma^2");
}

Vector StreamingView::component_gradient(std::size_t, const Vector& x) const {
    const auto i = static_cast<std::size_t>(rng_.uniform_int(base_->component_count()));
    return base_->component_gradient(i, x);
}

Vector StreamingView::component_gradient_diff(std::size_t, const Vector& x_new,
                                              const Vector& x_old) const {
    const auto i = static_cast<std::size_t>(rng_.uniform_int(base_->component_count()));
    return base_->component_gradient(i, x_new) - base_->component_gradient(i, x_old);
}

void StreamingView::reset_stream(std::uint64_t seed) const {
    rng_ = RandomSource(seed);
}

std::shared_ptr<StreamingView> streaming_view(std::shared_ptr<const FiniteSumProblem> base,
                                              RandomSource rng) {
    return std::make_shared<StreamingView>(std::move(base), rng);
}

}  // namespace pageopt
