#include "avgfuse/ffusion.hpp"

#include <cmath>
#include <string>

namespace avgfuse {

namespace {

void require_two(const FusionWeights& w, const char* who) {
    if (w.size() != 2) throw std::invalid_argument(std::string(who) + ": expects two weights");
}

void require_shared_grid(std::span<const GridDensity> ds, const FusionWeights& w,
                         const char* who) {
    if (ds.empty()) throw std::invalid_argument(std::string(who) + ": no input densities");
    if (static_cast<Eigen::Index>(ds.size()) != w.size())
        throw std::invalid_argument(std::string(who) + ": density/weight count mismatch");
    for (const GridDensity& d : ds) {
        if (!d.same_grid(ds[0])) throw std::invalid_argument(std::string(who) + ": grid mismatch");
        if (!d.is_normalized())
            throw std::invalid_argument(std::string(who) + ": unnormalized density");
    }
}

}  // namespace

MomentSummary gaussian_aa_moments(const Gaussian1D& g1, const Gaussian1D& g2,
                                  const FusionWeights& w) {
    require_two(w, "gaussian_aa_moments");
    const double w1 = w[0], w2 = w[1];
    const double dmu = g1.mean() - g2.mean();
    MomentSummary out;
    out.mean = w1 * g1.mean() + w2 * g2.mean();
    out.variance = w1 * g1.variance() + w2 * g2.variance() + w1 * w2 * dmu * dmu;
    return out;
}

Gaussian1D gaussian_ga(const Gaussian1D& g1, const Gaussian1D& g2, const FusionWeights& w) {
    require_two(w, "gaussian_ga");
    const double w1 = w[0], w2 = w[1];
    const double variance = g1.variance() * g2.variance() /
                            (w1 * g2.variance() + w2 * g1.variance());
    const double i1 = w1 / g1.variance(), i2 = w2 / g2.variance();
    const double mean = (i1 * g1.mean() + i2 * g2.mean()) / (i1 + i2);
    return Gaussian1D(mean, variance);
}

MseBreakdown gaussian_aa_mse(const Gaussian1D& g1, const Gaussian1D& g2, const FusionWeights& w,
                             const TruthContext& truth) {
    require_two(w, "gaussian_aa_mse");
    const double w1 = w[0], w2 = w[1];
    const double xi1 = g1.mean() - truth.theta;
    const double xi2 = g2.mean() - truth.theta;
    MseBreakdown out;
    out.variance_part = w1 * g1.variance() + w2 * g2.variance();
    out.bias_sq_part = w1 * xi1 * xi1 + w2 * xi2 * xi2;
    out.total = out.variance_part + out.bias_sq_part;
    return out;
}

MseBreakdown gaussian_ga_mse(const Gaussian1D& g1, const Gaussian1D& g2, const FusionWeights& w,
                             const TruthContext& truth) {
    require_two(w, "gaussian_ga_mse");
    const double w1 = w[0], w2 = w[1];
    const double i1 = w1 / g1.variance(), i2 = w2 / g2.variance();
    const double a = i1 / (i1 + i2);
    const double b = 1.0 - a;
    const double xi1 = g1.mean() - truth.theta;
    const double xi2 = g2.mean() - truth.theta;
    const double bias = a * xi1 + b * xi2;
    MseBreakdown out;
    out.variance_part = g1.variance() * g2.variance() / (w1 * g2.variance() + w2 * g1.variance());
    out.bias_sq_part = bias * bias;
    out.total = out.variance_part + out.bias_sq_part;
    return out;
}

GridDensity grid_aa(std::span<const GridDensity> ds, const FusionWeights& w) {
    require_shared_grid(ds, w, "grid_aa");
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(ds[0].n_points());
    for (std::size_t i = 0; i < ds.size(); ++i)
        acc += w[static_cast<Eigen::Index>(i)] * ds[i].values();
    return GridDensity(ds[0].x_min(), ds[0].x_max(), std::move(acc), true);
}

GridDensity grid_ga(std::span<const GridDensity> ds, const FusionWeights& w) {
    require_shared_grid(ds, w, "grid_ga");
    const Eigen::Index n = ds[0].n_points();
    // Weighted product in the log domain; any zero input value zeroes the
    // point (0^w := 0), so the support is the intersection of the inputs'.
    Eigen::ArrayXd logp = Eigen::ArrayXd::Zero(n);
    Eigen::Array<bool, Eigen::Dynamic, 1> in_support =
        Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, true);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const Eigen::ArrayXd& v = ds[i].values();
        const double wi = w[static_cast<Eigen::Index>(i)];
        for (Eigen::Index k = 0; k < n; ++k) {
            if (v[k] > 0.0)
                logp[k] += wi * std::log(v[k]);
            else
                in_support[k] = false;
        }
    }
    if (!in_support.any()) throw std::invalid_argument("GA undefined: disjoint supports");
    Eigen::ArrayXd prod = in_support.select(logp.exp(), Eigen::ArrayXd::Zero(n));
    if (!(prod > 0.0).any())
        throw std::invalid_argument("GA undefined: product underflows everywhere");
    GridDensity raw(ds[0].x_min(), ds[0].x_max(), std::move(prod));
    if (raw.integral() < 1e-12) return raw;  // near-disjoint supports
    return raw.normalize();
}

std::vector<FusionSurfacePoint> fusion_surface(const Gaussian1D& g1, const Gaussian1D& g2,
                                               double theta_min, double theta_max, int n_theta,
                                               int n_weights) {
    if (n_theta < 1 || n_weights < 1)
        throw std::invalid_argument("fusion_surface: grid sizes must be positive");
    if (!(theta_max >= theta_min))
        throw std::invalid_argument("fusion_surface: empty theta range");
    std::vector<FusionSurfacePoint> out;
    out.reserve(static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_weights));
    for (int t = 0; t < n_theta; ++t) {
        const double theta =
            (n_theta == 1) ? theta_min
                           : theta_min + (theta_max - theta_min) * t / double(n_theta - 1);
        const TruthContext truth{theta};
        for (int k = 1; k <= n_weights; ++k) {
            const double w1 = double(k) / double(n_weights + 1);
            const FusionWeights w = FusionWeights::pair(w1);
            FusionSurfacePoint p;
            p.theta = theta;
            p.omega1 = w1;
            p.aa_variance = gaussian_aa_moments(g1, g2, w).variance;
            p.ga_variance = gaussian_ga(g1, g2, w).variance();
            p.aa_mse = gaussian_aa_mse(g1, g2, w, truth).total;
            p.ga_mse = gaussian_ga_mse(g1, g2, w, truth).total;
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace avgfuse
