#include "avgfuse/core.hpp"

#include <cmath>
#include <limits>

namespace avgfuse {

namespace {
constexpr double kWeightSumTol = 1e-12;
constexpr double kNormalizedTol = 1e-6;
}  // namespace

FusionWeights::FusionWeights(Eigen::ArrayXd weights) : weights_(std::move(weights)) {
    if (weights_.size() < 2) throw std::invalid_argument("fusion weights: need at least two sources");
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
        const double w = weights_[i];
        if (!(w > 0.0 && w < 1.0))
            throw std::invalid_argument("fusion weights: every weight must lie strictly in (0,1)");
    }
    if (std::abs(weights_.sum() - 1.0) > kWeightSumTol)
        throw std::invalid_argument("fusion weights: weights must sum to one");
}

FusionWeights::FusionWeights(std::initializer_list<double> weights)
    : FusionWeights(Eigen::Map<const Eigen::ArrayXd>(weights.begin(),
                                                     static_cast<Eigen::Index>(weights.size()))) {}

FusionWeights FusionWeights::pair(double w1) {
    Eigen::ArrayXd w(2);
    w << w1, 1.0 - w1;
    return FusionWeights(std::move(w));
}

FusionWeights FusionWeights::uniform(int n) {
    if (n < 2) throw std::invalid_argument("fusion weights: need at least two sources");
    Eigen::ArrayXd w = Eigen::ArrayXd::Constant(n, 1.0 / static_cast<double>(n));
    // Absorb the rounding residual so the sum is exactly one.
    w[n - 1] = 1.0 - w.head(n - 1).sum();
    return FusionWeights(std::move(w));
}

Gaussian1D::Gaussian1D(double mean, double variance) : mean_(mean), variance_(variance) {
    if (!std::isfinite(mean_)) throw std::invalid_argument("gaussian: mean must be finite");
    if (!(variance_ > 0.0) || !std::isfinite(variance_))
        throw std::invalid_argument("gaussian: variance must be positive");
}

GridDensity::GridDensity(double x_min, double x_max, Eigen::ArrayXd values, bool normalized)
    : x_min_(x_min), x_max_(x_max), values_(std::move(values)), normalized_(normalized) {
    if (!(x_max_ > x_min_)) throw std::invalid_argument("grid density: x_max must exceed x_min");
    if (values_.size() < 16) throw std::invalid_argument("grid density: need at least 16 points");
    if (!values_.isFinite().all() || (values_ < 0.0).any())
        throw std::invalid_argument("grid density: values must be finite and non-negative");
    if (!(values_ > 0.0).any()) throw std::invalid_argument("grid density: empty support");
    if (normalized_ && std::abs(integral() - 1.0) > kNormalizedTol)
        throw std::invalid_argument("grid density: flagged normalized but integral is not one");
}

double GridDensity::integral() const {
    return dx() * (values_.sum() - 0.5 * (values_[0] + values_[values_.size() - 1]));
}

GridDensity GridDensity::normalize() const {
    const double mass = integral();
    if (!(mass > 1e-300)) throw std::invalid_argument("grid density: cannot normalize, mass is zero");
    return GridDensity(x_min_, x_max_, values_ / mass, true);
}

bool GridDensity::same_grid(const GridDensity& other) const {
    return x_min_ == other.x_min_ && x_max_ == other.x_max_ && n_points() == other.n_points();
}

GridDensity GridDensity::gaussian(const Gaussian1D& g, Eigen::Index n) {
    const double pad = 6.0 * std::sqrt(g.variance());
    return gaussian(g, g.mean() - pad, g.mean() + pad, n);
}

GridDensity GridDensity::gaussian(const Gaussian1D& g, double x_min, double x_max, Eigen::Index n) {
    const double inv2v = 0.5 / g.variance();
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * g.variance());
    return tabulate(x_min, x_max, n, [&](double x) {
        const double d = x - g.mean();
        return norm * std::exp(-d * d * inv2v);
    });
}

namespace {

// Trapezoidal quadrature of g(x) * f(x) over the density's grid.
template <typename Fn>
double trapz_weighted(const GridDensity& d, Fn&& g) {
    const Eigen::ArrayXd& f = d.values();
    const Eigen::Index n = f.size();
    double acc = 0.5 * (g(d.x(0)) * f[0] + g(d.x(n - 1)) * f[n - 1]);
    for (Eigen::Index i = 1; i + 1 < n; ++i) acc += g(d.x(i)) * f[i];
    return acc * d.dx();
}

}  // namespace

MomentSummary moments_of_grid(const GridDensity& d) {
    if (!d.is_normalized()) throw std::invalid_argument("unnormalized density");
    // Divide by the actual mass so the moment identities stay exact even when
    // the integral is only within tolerance of one.
    const double mass = d.integral();
    const double m1 = trapz_weighted(d, [](double x) { return x; }) / mass;
    const double m2 = trapz_weighted(d, [](double x) { return x * x; }) / mass;
    MomentSummary out;
    out.mean = m1;
    out.variance = std::max(0.0, m2 - m1 * m1);
    return out;
}

MseBreakdown mse_of_grid(const GridDensity& d, const TruthContext& truth) {
    if (!d.is_normalized()) throw std::invalid_argument("unnormalized density");
    const double mass = d.integral();
    const double theta = truth.theta;
    const MomentSummary m = moments_of_grid(d);
    const double bias = m.mean - theta;
    MseBreakdown out;
    out.total = trapz_weighted(d, [=](double x) { return (theta - x) * (theta - x); }) / mass;
    out.variance_part = m.variance;
    out.bias_sq_part = bias * bias;
    return out;
}

}  // namespace avgfuse
