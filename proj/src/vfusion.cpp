#include "avgfuse/vfusion.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace avgfuse {

PairCorrelation::PairCorrelation(double r) : rho(r) {
    if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("correlation must satisfy |rho| < 1");
}

VarianceRatio::VarianceRatio(double a) : alpha(a) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("variance ratio must be positive");
}

MseCorrelation::MseCorrelation(double b) : beta(b) {
    if (!(std::abs(beta) < 1.0)) throw std::invalid_argument("mse correlation must satisfy |beta| < 1");
}

MseRatio::MseRatio(double g) : gamma(g) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("mse ratio must be positive");
}

double v_aa(const Eigen::ArrayXd& values, const FusionWeights& w) {
    if (values.size() != w.size())
        throw std::invalid_argument("v_aa: values/weights length mismatch");
    return (w.values() * values).sum();
}

double v_ga(const Eigen::ArrayXd& values, const FusionWeights& w) {
    if (values.size() != w.size())
        throw std::invalid_argument("v_ga: values/weights length mismatch");
    if (!(values > 0.0).all())
        throw std::invalid_argument("GA undefined for non-positive values");
    return std::exp((w.values() * values.log()).sum());
}

double aa_variance_two(double s1, double s2, PairCorrelation rho, const FusionWeights& w) {
    if (w.size() != 2) throw std::invalid_argument("aa_variance_two: expects two weights");
    if (!(s1 > 0.0) || !(s2 > 0.0))
        throw std::invalid_argument("aa_variance_two: variances must be positive");
    const double w1 = w[0], w2 = w[1];
    return w1 * w1 * s1 + w2 * w2 * s2 + 2.0 * w1 * w2 * rho.rho * std::sqrt(s1 * s2);
}

double h_function(double w, VarianceRatio alpha, PairCorrelation rho) {
    if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument("h_function: w must lie in (0,1)");
    const double ra = std::sqrt(alpha.alpha);
    return 1.0 - 2.0 * w + w * w + w * w * alpha.alpha + 2.0 * rho.rho * ra * (w - w * w);
}

std::variant<FusionWeights, BoundaryInfimum> optimal_aa_weights(VarianceRatio alpha,
                                                                PairCorrelation rho) {
    if (alpha.alpha < 1.0)
        throw std::invalid_argument("optimal_aa_weights: order sources so alpha >= 1");
    const double ra = std::sqrt(alpha.alpha);
    if (rho.rho >= 1.0 / ra) {
        // Stationary point falls at or below w = 0; infimum min(s1,s2) = s1 as
        // omega2 -> 0.
        return BoundaryInfimum{true};
    }
    const double denom = 1.0 + alpha.alpha - 2.0 * rho.rho * ra;
    const double w1 = (alpha.alpha - rho.rho * ra) / denom;
    const double w2 = (1.0 - rho.rho * ra) / denom;
    return FusionWeights({w1, w2});
}

double aa_variance_lower_bound(double s1, double s2, PairCorrelation rho) {
    if (!(s1 > 0.0) || !(s2 > 0.0))
        throw std::invalid_argument("aa_variance_lower_bound: variances must be positive");
    const double lo = std::min(s1, s2), hi = std::max(s1, s2);
    const double alpha = hi / lo;
    if (rho.rho < std::sqrt(lo / hi)) {
        const double denom = 1.0 + alpha - 2.0 * rho.rho * std::sqrt(alpha);
        return alpha * (1.0 - rho.rho * rho.rho) / denom * lo;
    }
    return lo;
}

double aa_mse_two(double m1, double m2, MseCorrelation beta, const FusionWeights& w) {
    if (w.size() != 2) throw std::invalid_argument("aa_mse_two: expects two weights");
    if (!(m1 > 0.0) || !(m2 > 0.0))
        throw std::invalid_argument("aa_mse_two: MSE inputs must be positive");
    const double w1 = w[0], w2 = w[1];
    return w1 * w1 * m1 + w2 * w2 * m2 + 2.0 * w1 * w2 * beta.beta * std::sqrt(m1 * m2);
}

bool unweighted_aa_beats_best(MseRatio gamma, MseCorrelation beta) {
    return beta.beta < (3.0 - gamma.gamma) / (2.0 * std::sqrt(gamma.gamma));
}

double aa_variance_n(const Eigen::MatrixXd& covariance, const FusionWeights& w) {
    const Eigen::Index n = w.size();
    if (covariance.rows() != n || covariance.cols() != n)
        throw std::invalid_argument("aa_variance_n: covariance size must match weight count");
    const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
    if (((covariance - covariance.transpose()).cwiseAbs().maxCoeff()) > 1e-9 * scale)
        throw std::invalid_argument("aa_variance_n: covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
        throw std::invalid_argument("aa_variance_n: covariance must be positive semidefinite");
    const Eigen::VectorXd wv = w.values().matrix();
    return wv.dot(covariance * wv);
}

}  // namespace avgfuse
