#pragma once

#include <Eigen/Core>
#include <initializer_list>
#include <stdexcept>

namespace avgfuse {

/// Convex fusion weights: every entry strictly inside (0,1), summing to one.
/// Degenerate weights (0 or 1) are rejected; a source with weight zero is
/// simply not part of the fusion.
class FusionWeights {
public:
    explicit FusionWeights(Eigen::ArrayXd weights);
    FusionWeights(std::initializer_list<double> weights);

    /// Two-source weights {w1, 1 - w1}.
    static FusionWeights pair(double w1);
    /// n equal weights 1/n.
    static FusionWeights uniform(int n);

    Eigen::Index size() const { return weights_.size(); }
    double operator[](Eigen::Index i) const { return weights_[i]; }
    const Eigen::ArrayXd& values() const { return weights_; }

private:
    Eigen::ArrayXd weights_;
};

/// Scalar Gaussian density N(mean, variance), variance > 0.
class Gaussian1D {
public:
    Gaussian1D(double mean, double variance);
    double mean() const { return mean_; }
    double variance() const { return variance_; }

private:
    double mean_;
    double variance_;
};

/// The (usually unknown) true parameter value an estimator targets.
struct TruthContext {
    double theta = 0.0;
};

/// First and second moment of an estimator's distribution.
struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean square error split into its spread and offset contributions.
/// `total` always equals `variance_part + bias_sq_part`; the two parts
/// mean different things depending on which decomposition produced them,
/// see the f-fusion MSE routines.
struct MseBreakdown {
    double total = 0.0;
    double variance_part = 0.0;
    double bias_sq_part = 0.0;
};

/// A density tabulated on a uniform grid over [x_min, x_max].
/// Values are non-negative; points with value exactly zero are outside the
/// support. A density is `normalized` when its trapezoidal integral is one
/// (within 1e-6); the moment routines require that.
class GridDensity {
public:
    GridDensity(double x_min, double x_max, Eigen::ArrayXd values, bool normalized = false);

    /// Tabulate fn over [x_min, x_max] on n points and normalize.
    template <typename Fn>
    static GridDensity tabulate(double x_min, double x_max, Eigen::Index n, Fn&& fn) {
        Eigen::ArrayXd v(n);
        const double h = (x_max - x_min) / static_cast<double>(n - 1);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = fn(x_min + static_cast<double>(i) * h);
        return GridDensity(x_min, x_max, std::move(v)).normalize();
    }

    /// Gaussian density tabulated over a six-sigma padded range.
    static GridDensity gaussian(const Gaussian1D& g, Eigen::Index n = kDefaultPoints);
    static GridDensity gaussian(const Gaussian1D& g, double x_min, double x_max,
                                Eigen::Index n = kDefaultPoints);

    static constexpr Eigen::Index kDefaultPoints = 4001;

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    Eigen::Index n_points() const { return values_.size(); }
    double dx() const { return (x_max_ - x_min_) / static_cast<double>(n_points() - 1); }
    double x(Eigen::Index i) const { return x_min_ + static_cast<double>(i) * dx(); }
    const Eigen::ArrayXd& values() const { return values_; }
    bool is_normalized() const { return normalized_; }

    /// Trapezoidal integral of the tabulated values.
    double integral() const;
    /// Rescale so the integral is one. Throws if the mass is vanishingly small.
    GridDensity normalize() const;
    /// True if the two densities share x_min, x_max and point count exactly.
    bool same_grid(const GridDensity& other) const;

private:
    double x_min_;
    double x_max_;
    Eigen::ArrayXd values_;
    bool normalized_;
};

/// Mean and variance of a normalized grid density (trapezoidal quadrature).
MomentSummary moments_of_grid(const GridDensity& d);

/// MSE of a normalized grid density against the true value, with its
/// variance + squared-bias decomposition.
MseBreakdown mse_of_grid(const GridDensity& d, const TruthContext& truth);

}  // namespace avgfuse
