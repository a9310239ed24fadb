#include "avgfuse/gmfusion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <numeric>

#include "json.hpp"

namespace avgfuse {

namespace {

double normal_pdf(double x, double mean, double variance) {
    const double d = x - mean;
    return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * M_PI * variance);
}

}  // namespace

double GaussianComponent::density(double x) const {
    return weight * normal_pdf(x, mean, variance);
}

GaussianComponent make_component(double weight, double mean, double variance) {
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw std::invalid_argument("gaussian component: weight must be positive");
    if (!std::isfinite(mean)) throw std::invalid_argument("gaussian component: mean must be finite");
    if (!(variance > 0.0) || !std::isfinite(variance))
        throw std::invalid_argument("gaussian component: variance must be positive");
    return GaussianComponent{weight, mean, variance};
}

double GaussianMixture::weight_sum() const {
    return std::accumulate(components.begin(), components.end(), 0.0,
                           [](double acc, const GaussianComponent& c) { return acc + c.weight; });
}

double GaussianMixture::density(double x) const {
    double acc = 0.0;
    for (const GaussianComponent& c : components) acc += c.density(x);
    return acc;
}

Eigen::ArrayXd GaussianMixture::tabulate(double x_min, double x_max, Eigen::Index n) const {
    Eigen::ArrayXd out(n);
    const double h = (x_max - x_min) / static_cast<double>(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = density(x_min + static_cast<double>(i) * h);
    return out;
}

GaussianComponent gc_power(const GaussianComponent& c, double omega) {
    if (!(omega > 0.0 && omega <= 1.0))
        throw std::invalid_argument("gc_power: omega must lie in (0,1]");
    // eps(omega, P) = sqrt((2*pi*P)^(1-omega) / omega); (2*pi*P)^(1-omega)
    // spans many decades, so stay in logs.
    const double log_eps =
        0.5 * ((1.0 - omega) * std::log(2.0 * M_PI * c.variance) - std::log(omega));
    GaussianComponent out;
    out.weight = std::exp(omega * std::log(c.weight) + log_eps);
    out.mean = c.mean;
    out.variance = c.variance / omega;
    return out;
}

GaussianComponent gc_product(const GaussianComponent& c1, const GaussianComponent& c2) {
    const double i1 = 1.0 / c1.variance, i2 = 1.0 / c2.variance;
    GaussianComponent out;
    out.variance = 1.0 / (i1 + i2);
    out.mean = out.variance * (c1.mean * i1 + c2.mean * i2);
    out.weight = c1.weight * c2.weight * normal_pdf(c1.mean - c2.mean, 0.0, c1.variance + c2.variance);
    return out;
}

GaussianMixture gm_aa(std::span<const GaussianMixture> gms, const FusionWeights& w) {
    if (gms.empty()) throw std::invalid_argument("gm_aa: no input mixtures");
    if (static_cast<Eigen::Index>(gms.size()) != w.size())
        throw std::invalid_argument("gm_aa: mixture/weight count mismatch");
    GaussianMixture out;
    for (std::size_t i = 0; i < gms.size(); ++i) {
        const double wi = w[static_cast<Eigen::Index>(i)];
        for (const GaussianComponent& c : gms[i].components)
            out.components.push_back({wi * c.weight, c.mean, c.variance});
    }
    return out;
}

namespace {

// Any two components of one mixture closer than this (squared Mahalanobis,
// either variance) make the cross-product omission questionable.
bool mixture_has_overlap(const GaussianMixture& gm) {
    for (std::size_t i = 0; i < gm.components.size(); ++i)
        for (std::size_t j = i + 1; j < gm.components.size(); ++j) {
            const double d = gm.components[i].mean - gm.components[j].mean;
            const double p = std::min(gm.components[i].variance, gm.components[j].variance);
            if (d * d / p < 9.0) return true;
        }
    return false;
}

}  // namespace

GmGaDetail gm_ga_approx_detailed(const GaussianMixture& gm1, const GaussianMixture& gm2,
                                 const FusionWeights& w) {
    if (w.size() != 2) throw std::invalid_argument("gm_ga_approx: expects two weights");
    if (gm1.empty() || gm2.empty()) throw std::invalid_argument("gm_ga_approx: empty input mixture");

    GmGaDetail out;
    out.overlap_warning = mixture_has_overlap(gm1) || mixture_has_overlap(gm2);
    if (out.overlap_warning) {
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true))
            std::cerr << "gm_ga_approx: warning: mixture components overlap; the "
                         "cross-product-free power approximation degrades "
                         "(reported once per process)\n";
    }

    const double sum1 = gm1.weight_sum();
    const double sum2 = gm2.weight_sum();
    const double w1 = w[0], w2 = w[1];

    // Normalize each input to a probability mixture, then raise each
    // component to the corresponding fusion weight.
    std::vector<GaussianComponent> a, b;
    a.reserve(gm1.components.size());
    b.reserve(gm2.components.size());
    for (const GaussianComponent& c : gm1.components)
        a.push_back(gc_power({c.weight / sum1, c.mean, c.variance}, w1));
    for (const GaussianComponent& c : gm2.components)
        b.push_back(gc_power({c.weight / sum2, c.mean, c.variance}, w2));

    // All pairwise products; far-apart pairs can underflow and are dropped.
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            GaussianComponent p = gc_product(a[i], b[j]);
            if (p.weight > 0.0) {
                out.mixture.components.push_back(p);
                out.parents.emplace_back(static_cast<int>(i), static_cast<int>(j));
            }
        }
    if (out.mixture.empty())
        throw std::runtime_error("gm_ga_approx: all pairwise products vanished (disjoint mixtures)");

    // Renormalize, then cardinality consensus: the fused weight sum is the
    // arithmetic average of the input weight sums.
    const double mass = out.mixture.weight_sum();
    const double target = w1 * sum1 + w2 * sum2;
    for (GaussianComponent& c : out.mixture.components) c.weight *= target / mass;
    return out;
}

GaussianMixture gm_ga_approx(const GaussianMixture& gm1, const GaussianMixture& gm2,
                             const FusionWeights& w) {
    return gm_ga_approx_detailed(gm1, gm2, w).mixture;
}

GaussianMixture gm_ga_fold(std::span<const GaussianMixture> gms, const FusionWeights& w,
                           const ReduceParams* reduce_between) {
    if (gms.empty()) throw std::invalid_argument("gm_ga_fold: no input mixtures");
    if (static_cast<Eigen::Index>(gms.size()) != w.size())
        throw std::invalid_argument("gm_ga_fold: mixture/weight count mismatch");
    GaussianMixture acc = gms[0];
    double w_acc = w[0];
    for (std::size_t i = 1; i < gms.size(); ++i) {
        const double wi = w[static_cast<Eigen::Index>(i)];
        const FusionWeights pair_w = FusionWeights::pair(w_acc / (w_acc + wi));
        acc = gm_ga_approx(acc, gms[i], pair_w);
        if (reduce_between) acc = reduce(acc, *reduce_between);
        w_acc += wi;
    }
    return acc;
}

GaussianMixture reduce(const GaussianMixture& gm, const ReduceParams& params) {
    if (params.prune_threshold < 0.0 || params.merge_threshold < 0.0)
        throw std::invalid_argument("reduce: thresholds must be non-negative");
    if (params.max_components < 1)
        throw std::invalid_argument("reduce: max_components must be positive");
    if (gm.empty()) return gm;

    const double total = gm.weight_sum();
    std::vector<GaussianComponent> pool;
    pool.reserve(gm.components.size());
    for (const GaussianComponent& c : gm.components)
        if (c.weight >= params.prune_threshold) pool.push_back(c);
    if (pool.empty()) {
        // Everything fell under the prune threshold; keep the heaviest term.
        pool.push_back(*std::max_element(
            gm.components.begin(), gm.components.end(),
            [](const GaussianComponent& x, const GaussianComponent& y) { return x.weight < y.weight; }));
    }

    // Greedy dominant-first merging, moment preserving within each group.
    std::vector<GaussianComponent> merged;
    std::vector<bool> used(pool.size(), false);
    for (;;) {
        int dom = -1;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (!used[i] && (dom < 0 || pool[i].weight > pool[static_cast<std::size_t>(dom)].weight))
                dom = static_cast<int>(i);
        if (dom < 0) break;
        const double m_dom = pool[static_cast<std::size_t>(dom)].mean;
        double wsum = 0.0, msum = 0.0;
        std::vector<std::size_t> group;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (used[i]) continue;
            const double d = pool[i].mean - m_dom;
            if (d * d / pool[i].variance <= params.merge_threshold) {
                group.push_back(i);
                wsum += pool[i].weight;
                msum += pool[i].weight * pool[i].mean;
            }
        }
        const double mean = msum / wsum;
        double psum = 0.0;
        for (std::size_t i : group) {
            const double d = pool[i].mean - mean;
            psum += pool[i].weight * (pool[i].variance + d * d);
            used[i] = true;
        }
        merged.push_back({wsum, mean, psum / wsum});
    }

    std::sort(merged.begin(), merged.end(),
              [](const GaussianComponent& x, const GaussianComponent& y) {
                  if (x.weight != y.weight) return x.weight > y.weight;
                  return x.mean < y.mean;
              });
    if (static_cast<int>(merged.size()) > params.max_components)
        merged.resize(static_cast<std::size_t>(params.max_components));

    GaussianMixture out;
    out.components = std::move(merged);
    const double kept = out.weight_sum();
    for (GaussianComponent& c : out.components) c.weight *= total / kept;
    return out;
}

ExtractionRule ExtractionRule::by_threshold(double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("extraction: threshold must be positive");
    ExtractionRule r;
    r.kind = Kind::threshold;
    r.threshold = tau;
    return r;
}

ExtractionRule ExtractionRule::by_rank(int n) {
    if (n < 0) throw std::invalid_argument("extraction: rank must be non-negative");
    ExtractionRule r;
    r.kind = Kind::rank;
    r.rank = n;
    return r;
}

std::vector<double> extract_states(const GaussianMixture& gm, const ExtractionRule& rule) {
    std::vector<double> out;
    if (rule.kind == ExtractionRule::Kind::threshold) {
        for (const GaussianComponent& c : gm.components)
            if (c.weight > rule.threshold) out.push_back(c.mean);
        return out;
    }
    std::vector<std::size_t> order(gm.components.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const GaussianComponent& a = gm.components[i];
        const GaussianComponent& b = gm.components[j];
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.mean != b.mean) return a.mean < b.mean;
        return i < j;
    });
    const std::size_t n = std::min<std::size_t>(order.size(), static_cast<std::size_t>(rule.rank));
    for (std::size_t k = 0; k < n; ++k) out.push_back(gm.components[order[k]].mean);
    return out;
}

std::string gm_to_json(const GaussianMixture& gm) {
    nlohmann::json j = nlohmann::json::array();
    for (const GaussianComponent& c : gm.components)
        j.push_back({{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}});
    return j.dump(2);
}

GaussianMixture gm_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_array()) throw std::invalid_argument("gm_from_json: expected an array of components");
    GaussianMixture gm;
    for (const nlohmann::json& e : j)
        gm.components.push_back(make_component(e.at("weight").get<double>(),
                                               e.at("mean").get<double>(),
                                               e.at("variance").get<double>()));
    return gm;
}

}  // namespace avgfuse
