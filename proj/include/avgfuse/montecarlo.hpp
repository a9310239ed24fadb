#pragma once

#include <cstdint>

#include "avgfuse/core.hpp"

namespace avgfuse {

/// Specification of a correlated sample-pair experiment. Gaussian pairs are
/// truncated to positive values so their geometric average stays real;
/// Poisson pairs are produced through a Gaussian copula (NORTA) whose
/// correlation is calibrated so the achieved Pearson correlation matches the
/// target, and zero-valued pairs are redrawn.
struct CorrelatedPairSpec {
    enum class Family { truncated_gaussian, poisson };

    Family family = Family::truncated_gaussian;
    double mean1 = 0.0, variance1 = 1.0;
    double mean2 = 0.0, variance2 = 1.0;
    double rate1 = 1.0, rate2 = 1.0;
    double target_rho = 0.0;
    long n_samples = 1000000;
    std::uint64_t seed = 0;

    static CorrelatedPairSpec truncated_gaussian(double mean1, double variance1, double mean2,
                                                 double variance2, double target_rho,
                                                 long n_samples, std::uint64_t seed);
    static CorrelatedPairSpec poisson(double rate1, double rate2, double target_rho,
                                      long n_samples, std::uint64_t seed);
    void validate() const;
};

/// A generated pair population and its measured correlation.
struct PairSample {
    Eigen::ArrayXd s1;
    Eigen::ArrayXd s2;
    double achieved_rho = 0.0;
};

/// Draw the sample pairs a CorrelatedPairSpec describes. Each pair index owns
/// its own counter substream, so the result is reproducible bit for bit
/// regardless of how the work is scheduled.
PairSample sample_pairs(const CorrelatedPairSpec& spec);

/// Empirical AA/GA statistics over a weight grid omega1 = k/(grid+1).
struct SweepResult {
    Eigen::ArrayXd omega1;
    Eigen::ArrayXd aa_mean, aa_var, aa_var_se, aa_mse, aa_mse_se;
    Eigen::ArrayXd ga_mean, ga_var, ga_var_se, ga_mse, ga_mse_se;
    double achieved_rho = 0.0;
};

SweepResult sweep_from_samples(const Eigen::ArrayXd& s1, const Eigen::ArrayXd& s2,
                               const TruthContext& truth, int grid_size);

SweepResult sweep_weights(const CorrelatedPairSpec& spec, const TruthContext& truth,
                          int grid_size = 99);

/// Pearson correlation of two equally sized sample arrays.
double pearson_correlation(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b);

/// Empirical error correlation about the true value:
/// mean[(theta-s1)(theta-s2)] / sqrt(mse1 * mse2).
double empirical_mse_correlation(const Eigen::ArrayXd& s1, const Eigen::ArrayXd& s2, double theta);

/// Find the Gaussian-copula correlation that reproduces the target Pearson
/// correlation for a Poisson margin pair (monotone bisection against a fixed
/// calibration population). Throws when the target exceeds the attainable
/// range, reporting that range.
double calibrate_poisson_copula(double rate1, double rate2, double target_rho);

}  // namespace avgfuse
