#include "avgfuse/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "avgfuse/rng.hpp"

namespace avgfuse {

void ScenarioSpec::validate() const {
    if (target_positions.empty()) throw std::invalid_argument("scenario: no targets");
    if (!(detection_prob > 0.0 && detection_prob <= 1.0))
        throw std::invalid_argument("scenario: detection probability must lie in (0,1]");
    if (clutter_rate < 0.0) throw std::invalid_argument("scenario: clutter rate must be >= 0");
    if (!(clutter_lo < clutter_hi))
        throw std::invalid_argument("scenario: clutter interval must be non-empty");
    if (n_sensors < 1) throw std::invalid_argument("scenario: need at least one sensor");
    if (!(detection_weight > 0.0) || !(detection_variance > 0.0) || !(clutter_weight > 0.0) ||
        !(clutter_variance > 0.0))
        throw std::invalid_argument("scenario: weights and variances must be positive");
    if (measurement_noise_std < 0.0)
        throw std::invalid_argument("scenario: noise std must be >= 0");
}

ScenarioSpec ScenarioSpec::fig6_preset(std::uint64_t seed) {
    ScenarioSpec s;
    s.target_positions = {20.0, 40.0, 70.0, 110.0, 200.0};
    s.detection_prob = 0.9;
    s.clutter_rate = 1.0;
    s.clutter_lo = 0.0;
    s.clutter_hi = 200.0;
    s.n_sensors = 6;
    s.detection_weight = 0.8;
    s.detection_variance = 100.0;
    s.clutter_weight = 0.3;
    s.clutter_variance = 150.0;
    s.measurement_noise_std = 2.0;
    s.seed = seed;
    return s;
}

ScenarioSpec ScenarioSpec::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ScenarioSpec s;
    s.target_positions = j.at("targets").get<std::vector<double>>();
    s.detection_prob = j.value("detection_prob", s.detection_prob);
    s.clutter_rate = j.value("clutter_rate", s.clutter_rate);
    if (j.contains("clutter_range")) {
        s.clutter_lo = j.at("clutter_range").at(0).get<double>();
        s.clutter_hi = j.at("clutter_range").at(1).get<double>();
    }
    s.n_sensors = j.value("n_sensors", s.n_sensors);
    s.detection_weight = j.value("detection_weight", s.detection_weight);
    s.detection_variance = j.value("detection_variance", s.detection_variance);
    s.clutter_weight = j.value("clutter_weight", s.clutter_weight);
    s.clutter_variance = j.value("clutter_variance", s.clutter_variance);
    s.measurement_noise_std = j.value("measurement_noise_std", s.measurement_noise_std);
    s.seed = j.value("seed", s.seed);
    s.validate();
    return s;
}

std::string ScenarioSpec::to_json() const {
    nlohmann::json j;
    j["targets"] = target_positions;
    j["detection_prob"] = detection_prob;
    j["clutter_rate"] = clutter_rate;
    j["clutter_range"] = {clutter_lo, clutter_hi};
    j["n_sensors"] = n_sensors;
    j["detection_weight"] = detection_weight;
    j["detection_variance"] = detection_variance;
    j["clutter_weight"] = clutter_weight;
    j["clutter_variance"] = clutter_variance;
    j["measurement_noise_std"] = measurement_noise_std;
    j["seed"] = seed;
    return j.dump(2);
}

namespace {

// Counter layout inside one sensor's stream: counters 2t and 2t+1 drive
// target t's detection coin and measurement noise; the clutter count sits at
// a fixed offset with the positions following it.
constexpr std::uint64_t kClutterCounterBase = 1u << 20;

long draw_poisson_count(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                        double rate) {
    if (rate == 0.0) return 0;
    return poisson_quantile(uniform_double(seed, stream, counter), rate);
}

}  // namespace

std::vector<SensorReport> generate(const ScenarioSpec& spec) {
    spec.validate();
    std::vector<SensorReport> reports;
    reports.reserve(static_cast<std::size_t>(spec.n_sensors));
    for (int s = 0; s < spec.n_sensors; ++s) {
        const std::uint64_t stream = static_cast<std::uint64_t>(s);
        SensorReport rep;
        rep.sensor_id = s;
        for (std::size_t t = 0; t < spec.target_positions.size(); ++t) {
            const auto u = uniform_pair(spec.seed, stream, 2 * t);
            if (u[0] >= spec.detection_prob) continue;
            const double noise =
                spec.measurement_noise_std * normal_quantile(uniform_double(spec.seed, stream, 2 * t + 1));
            rep.mixture.components.push_back({spec.detection_weight,
                                              spec.target_positions[t] + noise,
                                              spec.detection_variance});
            rep.origins.push_back({false, static_cast<int>(t)});
        }
        const long n_clutter =
            draw_poisson_count(spec.seed, stream, kClutterCounterBase, spec.clutter_rate);
        for (long c = 0; c < n_clutter; ++c) {
            const double u =
                uniform_double(spec.seed, stream, kClutterCounterBase + 1 + static_cast<std::uint64_t>(c));
            rep.mixture.components.push_back({spec.clutter_weight,
                                              spec.clutter_lo + u * (spec.clutter_hi - spec.clutter_lo),
                                              spec.clutter_variance});
            rep.origins.push_back({true, -1});
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

GaussianMixture fuse_scenario(const std::vector<SensorReport>& reports, FuseRule rule,
                              const FusionWeights& w, const ReduceParams& reduction) {
    if (reports.empty()) throw std::invalid_argument("fuse_scenario: no reports");
    if (static_cast<Eigen::Index>(reports.size()) != w.size())
        throw std::invalid_argument("fuse_scenario: report/weight count mismatch");

    if (rule == FuseRule::aa) {
        std::vector<GaussianMixture> gms;
        gms.reserve(reports.size());
        for (const SensorReport& r : reports) gms.push_back(r.mixture);
        return reduce(gm_aa(gms, w), reduction);
    }

    // GA: fold non-empty mixtures in ascending sensor order.
    std::vector<const SensorReport*> ordered;
    for (const SensorReport& r : reports) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(),
              [](const SensorReport* a, const SensorReport* b) { return a->sensor_id < b->sensor_id; });

    std::vector<GaussianMixture> gms;
    std::vector<double> wv;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (ordered[i]->mixture.empty()) continue;
        gms.push_back(ordered[i]->mixture);
        wv.push_back(w[static_cast<Eigen::Index>(i)]);
    }
    if (gms.empty()) return GaussianMixture{};
    if (gms.size() == 1) return reduce(gms[0], reduction);

    const double wsum = std::accumulate(wv.begin(), wv.end(), 0.0);
    Eigen::ArrayXd warr(static_cast<Eigen::Index>(wv.size()));
    for (std::size_t i = 0; i < wv.size(); ++i) warr[static_cast<Eigen::Index>(i)] = wv[i] / wsum;
    warr[warr.size() - 1] = 1.0 - warr.head(warr.size() - 1).sum();

    GaussianMixture fused = gm_ga_fold(gms, FusionWeights(warr), &reduction);
    return reduce(fused, reduction);
}

GaussianMixture fuse_scenario_unweighted(const std::vector<SensorReport>& reports, FuseRule rule,
                                         const ReduceParams& reduction) {
    if (reports.empty()) throw std::invalid_argument("fuse_scenario: no reports");
    if (reports.size() == 1) return reduce(reports[0].mixture, reduction);
    return fuse_scenario(reports, rule, FusionWeights::uniform(static_cast<int>(reports.size())),
                         reduction);
}

ScoreResult score(const GaussianMixture& fused, const ExtractionRule& rule,
                  const std::vector<double>& truth, double gate) {
    if (!(gate > 0.0)) throw std::invalid_argument("score: gate must be positive");
    const std::vector<double> states = extract_states(fused, rule);

    struct Cand {
        double dist;
        std::size_t state;
        std::size_t truth;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = 0; j < truth.size(); ++j) {
            const double d = std::abs(states[i] - truth[j]);
            if (d <= gate) cands.push_back({d, i, j});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.state != b.state) return a.state < b.state;
        return a.truth < b.truth;
    });

    std::vector<bool> state_used(states.size(), false), truth_used(truth.size(), false);
    ScoreResult out;
    for (const Cand& c : cands) {
        if (state_used[c.state] || truth_used[c.truth]) continue;
        state_used[c.state] = true;
        truth_used[c.truth] = true;
        ++out.n_found;
        out.position_errors.push_back(c.dist);
    }
    out.n_false = static_cast<int>(states.size()) - out.n_found;
    return out;
}

TrialAssessment assess_trial(const GaussianMixture& fused, const std::vector<double>& truth,
                             const std::vector<double>& clutter_pos, double gate,
                             double weight_floor) {
    TrialAssessment out;
    std::vector<const GaussianComponent*> sig;
    for (const GaussianComponent& c : fused.components)
        if (c.weight >= weight_floor) sig.push_back(&c);

    for (double t : truth) {
        const bool covered = std::any_of(sig.begin(), sig.end(), [&](const GaussianComponent* c) {
            return std::abs(c->mean - t) <= gate;
        });
        if (!covered) ++out.missed_targets;
    }
    for (const GaussianComponent* c : sig) {
        const bool near_target = std::any_of(truth.begin(), truth.end(), [&](double t) {
            return std::abs(c->mean - t) <= gate;
        });
        if (near_target) continue;
        const bool near_clutter = std::any_of(clutter_pos.begin(), clutter_pos.end(), [&](double p) {
            return std::abs(c->mean - p) <= gate;
        });
        if (near_clutter) ++out.clutter_survivors;
    }
    return out;
}

std::vector<double> clutter_positions(const std::vector<SensorReport>& reports) {
    std::vector<double> out;
    for (const SensorReport& r : reports)
        for (std::size_t i = 0; i < r.origins.size(); ++i)
            if (r.origins[i].is_clutter) out.push_back(r.mixture.components[i].mean);
    return out;
}

double sign_test_p_one_sided(int n_plus, int n_minus) {
    if (n_plus < 0 || n_minus < 0) throw std::invalid_argument("sign test: negative counts");
    const int n = n_plus + n_minus;
    if (n == 0) return 1.0;
    // P(X >= n_plus), X ~ Binomial(n, 1/2), summed in log space.
    double p = 0.0;
    for (int k = n_plus; k <= n; ++k) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                std::lgamma(n - k + 1.0) - n * std::log(2.0);
        p += std::exp(log_term);
    }
    return std::min(1.0, p);
}

}  // namespace avgfuse
