#pragma once

#include <span>
#include <vector>

#include "avgfuse/core.hpp"

namespace avgfuse {

/// Mean and variance of the arithmetic average of two Gaussian densities.
/// The AA is a two-component mixture; its variance carries the mean-spread
/// term w1*w2*(mu1 - mu2)^2 on top of the averaged variances.
MomentSummary gaussian_aa_moments(const Gaussian1D& g1, const Gaussian1D& g2,
                                  const FusionWeights& w);

/// Geometric average of two Gaussian densities: stays Gaussian, with the
/// covariance-intersection mean and variance.
Gaussian1D gaussian_ga(const Gaussian1D& g1, const Gaussian1D& g2, const FusionWeights& w);

/// MSE of the Gaussian AA against truth. The breakdown aggregates per-source
/// terms: variance_part = w1*S1 + w2*S2, bias_sq_part = w1*xi1^2 + w2*xi2^2
/// (not the decomposition about the AA's own mean).
MseBreakdown gaussian_aa_mse(const Gaussian1D& g1, const Gaussian1D& g2, const FusionWeights& w,
                             const TruthContext& truth);

/// MSE of the Gaussian GA against truth: its own variance plus the squared
/// bias of the precision-weighted mean.
MseBreakdown gaussian_ga_mse(const Gaussian1D& g1, const Gaussian1D& g2, const FusionWeights& w,
                             const TruthContext& truth);

/// Pointwise weighted sum of normalized densities sharing one grid.
GridDensity grid_aa(std::span<const GridDensity> ds, const FusionWeights& w);

/// Normalized weighted geometric average of densities sharing one grid.
/// Points where any input is zero fall outside the result's support; an empty
/// support intersection is an error. If the normalization mass is below 1e-12
/// the raw product is returned unnormalized.
GridDensity grid_ga(std::span<const GridDensity> ds, const FusionWeights& w);

/// One cell of the analytic AA/GA comparison surface over (theta, omega1).
struct FusionSurfacePoint {
    double theta;
    double omega1;
    double aa_variance;
    double ga_variance;
    double aa_mse;
    double ga_mse;
};

/// Tabulate the closed-form AA/GA variance and MSE of two Gaussians over a
/// (theta, omega1) grid. omega1 runs over n_weights interior points
/// k/(n_weights+1).
std::vector<FusionSurfacePoint> fusion_surface(const Gaussian1D& g1, const Gaussian1D& g2,
                                               double theta_min, double theta_max, int n_theta,
                                               int n_weights);

}  // namespace avgfuse
