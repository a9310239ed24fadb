#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avgfuse/gmfusion.hpp"

namespace avgfuse {

/// Multi-sensor detection scenario: fixed targets, independent per-sensor
/// misdetection, Poisson clutter uniform over an interval. Each sensor
/// reports a Gaussian mixture of detections and false alarms.
struct ScenarioSpec {
    std::vector<double> target_positions;
    double detection_prob = 0.9;
    double clutter_rate = 1.0;           // Poisson mean per sensor
    double clutter_lo = 0.0, clutter_hi = 200.0;
    int n_sensors = 1;
    double detection_weight = 0.8;
    double detection_variance = 100.0;
    double clutter_weight = 0.3;
    double clutter_variance = 150.0;
    double measurement_noise_std = 2.0;
    std::uint64_t seed = 0;

    void validate() const;
    /// The six-sensor, five-target benchmark configuration.
    static ScenarioSpec fig6_preset(std::uint64_t seed);
    static ScenarioSpec from_json(const std::string& text);
    std::string to_json() const;
};

/// Where a reported component came from: a detected target (by index) or
/// clutter.
struct ComponentOrigin {
    bool is_clutter = false;
    int target_index = -1;
};

struct SensorReport {
    int sensor_id = 0;
    GaussianMixture mixture;
    std::vector<ComponentOrigin> origins;  // one flag per component
};

/// Draw one scenario realization, deterministic in spec.seed. A sensor that
/// detects nothing and draws no clutter reports an empty mixture.
std::vector<SensorReport> generate(const ScenarioSpec& spec);

enum class FuseRule { aa, ga };

/// Fuse the sensors' mixtures and reduce. The GA path folds pairwise fusion
/// in ascending sensor order, reducing after each fold; sensors with empty
/// mixtures are skipped for the GA (an empty report would annihilate the
/// product) with the remaining weights renormalized.
GaussianMixture fuse_scenario(const std::vector<SensorReport>& reports, FuseRule rule,
                              const FusionWeights& w, const ReduceParams& reduction);

/// Equal-weight fusion. A single report cannot carry convex weights, so it is
/// passed through reduction unchanged.
GaussianMixture fuse_scenario_unweighted(const std::vector<SensorReport>& reports, FuseRule rule,
                                         const ReduceParams& reduction);

/// Greedy one-to-one nearest matching of extracted states to truth positions.
struct ScoreResult {
    int n_found = 0;
    int n_false = 0;
    std::vector<double> position_errors;
};

ScoreResult score(const GaussianMixture& fused, const ExtractionRule& rule,
                  const std::vector<double>& truth, double gate);

/// Component-level trial diagnostics: a target is missed when no fused
/// component of weight >= weight_floor lies within the gate of it; a clutter
/// survivor is such a component that is far from every target but near one of
/// the trial's actual clutter draw positions.
struct TrialAssessment {
    int missed_targets = 0;
    int clutter_survivors = 0;
};

TrialAssessment assess_trial(const GaussianMixture& fused, const std::vector<double>& truth,
                             const std::vector<double>& clutter_positions, double gate,
                             double weight_floor);

/// Clutter draw positions of one realization, pulled from the reports' origin
/// flags.
std::vector<double> clutter_positions(const std::vector<SensorReport>& reports);

/// One-sided sign-test p-value: probability of at least n_plus successes in
/// n_plus + n_minus fair coin flips (exact binomial tail).
double sign_test_p_one_sided(int n_plus, int n_minus);

}  // namespace avgfuse
