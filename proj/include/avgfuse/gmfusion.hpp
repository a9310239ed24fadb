#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "avgfuse/core.hpp"

namespace avgfuse {

/// One weighted Gaussian term of a mixture intensity. Weights are expected
/// target mass, not probabilities, so they need not sum to one.
struct GaussianComponent {
    double weight = 1.0;
    double mean = 0.0;
    double variance = 1.0;

    /// Density value weight * N(x; mean, variance).
    double density(double x) const;
};

/// Checked constructor used at input boundaries (JSON, CLI, tests).
GaussianComponent make_component(double weight, double mean, double variance);

/// A weighted Gaussian sum. The weight sum is the expected number of targets
/// and is usually greater than one.
struct GaussianMixture {
    std::vector<GaussianComponent> components;

    double weight_sum() const;
    double density(double x) const;
    Eigen::Index size() const { return static_cast<Eigen::Index>(components.size()); }
    bool empty() const { return components.empty(); }

    /// Tabulate the mixture intensity on a uniform grid (no normalization).
    Eigen::ArrayXd tabulate(double x_min, double x_max, Eigen::Index n) const;
};

/// Fractional power of one weighted Gaussian: stays Gaussian with inflated
/// variance P/omega, weight w^omega * eps(omega, P) where
/// eps = sqrt((2*pi*P)^(1-omega) / omega). Computed in the log domain.
GaussianComponent gc_power(const GaussianComponent& c, double omega);

/// Product of two weighted Gaussians: another weighted Gaussian whose weight
/// carries the separation factor N(m1 - m2; 0, P1 + P2). The factor can
/// underflow to zero for far-apart components.
GaussianComponent gc_product(const GaussianComponent& c1, const GaussianComponent& c2);

/// Exact arithmetic average of mixtures: concatenation with rescaled weights.
GaussianMixture gm_aa(std::span<const GaussianMixture> gms, const FusionWeights& w);

/// Pairwise geometric-average fusion detail: the fused mixture plus, for each
/// output component, the (first, second) input component indices it came from,
/// and whether the within-mixture separation assumption looked violated.
struct GmGaDetail {
    GaussianMixture mixture;
    std::vector<std::pair<int, int>> parents;
    bool overlap_warning = false;
};

/// Approximate geometric average of two mixtures: normalize each input to a
/// probability mixture, raise components to the fusion weight, form all
/// pairwise products, renormalize, then rescale the weight sum to the
/// arithmetic average of the input weight sums (cardinality consensus).
/// Components whose product weight underflows to zero are dropped.
GmGaDetail gm_ga_approx_detailed(const GaussianMixture& gm1, const GaussianMixture& gm2,
                                 const FusionWeights& w);
GaussianMixture gm_ga_approx(const GaussianMixture& gm1, const GaussianMixture& gm2,
                             const FusionWeights& w);

struct ReduceParams {
    double prune_threshold = 1e-5;
    double merge_threshold = 4.0;  // squared Mahalanobis distance
    int max_components = 100;
};

/// n-way geometric average by left-folding the pairwise rule with running
/// renormalized weights. When reduction parameters are given the accumulator
/// is reduced after every fold to bound the component count.
GaussianMixture gm_ga_fold(std::span<const GaussianMixture> gms, const FusionWeights& w,
                           const ReduceParams* reduce_between = nullptr);

/// Standard mixture housekeeping: prune light components, merge components
/// close to the locally dominant one (moment preserving), cap the count, and
/// rescale so the total weight sum is unchanged.
GaussianMixture reduce(const GaussianMixture& gm, const ReduceParams& params);

struct ExtractionRule {
    enum class Kind { threshold, rank };
    Kind kind = Kind::threshold;
    double threshold = 0.5;  // weight threshold, kind == threshold
    int rank = 0;            // number of states, kind == rank

    static ExtractionRule by_threshold(double tau);
    static ExtractionRule by_rank(int n);
};

/// State extraction. Threshold: means of all components heavier than tau, in
/// input order. Rank: means of the n heaviest components (ties broken by
/// lower mean, then input order); asking for more states than there are
/// components returns them all.
std::vector<double> extract_states(const GaussianMixture& gm, const ExtractionRule& rule);

/// JSON wire format: a mixture is an array of {weight, mean, variance}
/// records; components are validated on load.
std::string gm_to_json(const GaussianMixture& gm);
GaussianMixture gm_from_json(const std::string& text);

}  // namespace avgfuse
