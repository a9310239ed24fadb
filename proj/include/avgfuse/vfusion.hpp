#pragma once

#include <variant>

#include "avgfuse/core.hpp"

namespace avgfuse {

/// Pearson correlation between two fusing estimators, |rho| < 1.
struct PairCorrelation {
    explicit PairCorrelation(double rho);
    double rho;
};

/// Ratio of the larger to the smaller source variance. Callers normalize so
/// alpha >= 1; the type only requires positivity.
struct VarianceRatio {
    explicit VarianceRatio(double alpha);
    double alpha;
};

/// Correlation of the two sources' errors about the true value, |beta| < 1.
struct MseCorrelation {
    explicit MseCorrelation(double beta);
    double beta;
};

/// Ratio of the larger to the smaller source MSE.
struct MseRatio {
    explicit MseRatio(double gamma);
    double gamma;
};

/// Weighted arithmetic average of point estimates.
double v_aa(const Eigen::ArrayXd& values, const FusionWeights& w);

/// Weighted geometric average of strictly positive point estimates,
/// evaluated in the log domain.
double v_ga(const Eigen::ArrayXd& values, const FusionWeights& w);

/// Variance of the two-source arithmetic average with correlated sources:
/// w1^2*s1 + w2^2*s2 + 2*w1*w2*rho*sqrt(s1*s2).
double aa_variance_two(double s1, double s2, PairCorrelation rho, const FusionWeights& w);

/// The convex weight-response function
///   h(w) = 1 - 2w + w^2 + w^2*alpha + 2*rho*sqrt(alpha)*(w - w^2),
/// for w in (0,1). The AA variance is h(w2)*s1 with alpha = s2/s1; the AA MSE
/// obeys the same form with (gamma, beta) in place of (alpha, rho).
double h_function(double w, VarianceRatio alpha, PairCorrelation rho);

/// The minimizer of h lies outside (0,1); the infimum min(s1,s2) is only
/// approached at a boundary.
struct BoundaryInfimum {
    /// True when the infimum is approached as w = omega2 -> 0 (omega1 -> 1),
    /// i.e. all weight on the smaller-variance source.
    bool at_omega2_zero;
};

/// Weights minimizing the two-source AA variance, for alpha = s2/s1 >= 1.
/// Interior optimum exists iff rho < 1/sqrt(alpha); otherwise the infimum sits
/// at a boundary and a BoundaryInfimum is returned.
std::variant<FusionWeights, BoundaryInfimum> optimal_aa_weights(VarianceRatio alpha,
                                                                PairCorrelation rho);

/// Greatest lower bound of the two-source AA variance over all admissible
/// weights. Sources are ordered internally, so s1 and s2 may come in any order.
double aa_variance_lower_bound(double s1, double s2, PairCorrelation rho);

/// MSE of the two-source arithmetic average:
/// w1^2*m1 + w2^2*m2 + 2*w1*w2*beta*sqrt(m1*m2).
double aa_mse_two(double m1, double m2, MseCorrelation beta, const FusionWeights& w);

/// Whether the unweighted (half/half) AA beats the better source in MSE:
/// true iff beta < (3 - gamma) / (2*sqrt(gamma)). Impossible once gamma > 9.
bool unweighted_aa_beats_best(MseRatio gamma, MseCorrelation beta);

/// n-source AA variance as the quadratic form w' * C * w over a caller
/// supplied covariance matrix (validated symmetric positive semidefinite).
double aa_variance_n(const Eigen::MatrixXd& covariance, const FusionWeights& w);

}  // namespace avgfuse
