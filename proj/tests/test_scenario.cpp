#include <cmath>

#include "doctest.h"

#include "avgfuse/rng.hpp"
#include "avgfuse/scenario.hpp"

using namespace avgfuse;

TEST_SUITE_BEGIN("scenario");

TEST_CASE("degenerate parameters give one exact component per target") {
    ScenarioSpec spec = ScenarioSpec::fig6_preset(77);
    spec.detection_prob = 1.0;
    spec.clutter_rate = 0.0;
    spec.measurement_noise_std = 0.0;
    const auto reports = generate(spec);
    REQUIRE(reports.size() == 6);
    for (const SensorReport& r : reports) {
        REQUIRE(r.mixture.size() == 5);
        for (int t = 0; t < 5; ++t) {
            CHECK(r.mixture.components[t].mean == spec.target_positions[t]);
            CHECK(!r.origins[t].is_clutter);
            CHECK(r.origins[t].target_index == t);
        }
    }
}

TEST_CASE("same seed reproduces reports exactly") {
    const ScenarioSpec spec = ScenarioSpec::fig6_preset(123456);
    const auto a = generate(spec);
    const auto b = generate(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t s = 0; s < a.size(); ++s) {
        REQUIRE(a[s].mixture.size() == b[s].mixture.size());
        for (Eigen::Index i = 0; i < a[s].mixture.size(); ++i) {
            CHECK(a[s].mixture.components[i].mean == b[s].mixture.components[i].mean);
            CHECK(a[s].mixture.components[i].weight == b[s].mixture.components[i].weight);
        }
    }
}

TEST_CASE("expected component count per sensor is p*T + clutter rate") {
    // 5 * 0.9 + 1 = 5.5 at the benchmark settings.
    const int trials = 10000;
    long total = 0;
    long sensors = 0;
    for (int t = 0; t < trials; ++t) {
        const ScenarioSpec spec = ScenarioSpec::fig6_preset(derive_seed(0xACC3, t));
        for (const SensorReport& r : generate(spec)) {
            total += r.mixture.size();
            ++sensors;
        }
    }
    const double mean = static_cast<double>(total) / static_cast<double>(sensors);
    CHECK(std::abs(mean - 5.5) < 0.05);
}

TEST_CASE("scenario spec json round trip and validation") {
    const ScenarioSpec spec = ScenarioSpec::fig6_preset(42);
    const ScenarioSpec back = ScenarioSpec::from_json(spec.to_json());
    CHECK(back.target_positions == spec.target_positions);
    CHECK(back.detection_prob == spec.detection_prob);
    CHECK(back.n_sensors == spec.n_sensors);
    CHECK(back.seed == spec.seed);
    CHECK_THROWS_AS(ScenarioSpec::from_json("{\"targets\": []}"), std::invalid_argument);
}

TEST_CASE("single sensor passes through up to reduction") {
    ScenarioSpec spec = ScenarioSpec::fig6_preset(9);
    spec.n_sensors = 1;
    const auto reports = generate(spec);
    REQUIRE(reports.size() == 1);
    const ReduceParams loose{0.0, 0.0, 1000};
    for (FuseRule rule : {FuseRule::aa, FuseRule::ga}) {
        const GaussianMixture out = fuse_scenario_unweighted(reports, rule, loose);
        REQUIRE(out.size() == reports[0].mixture.size());
        CHECK(out.weight_sum() == doctest::Approx(reports[0].mixture.weight_sum()).epsilon(1e-9));
    }
}

TEST_CASE("clean scenario: both rules recover all five targets by rank") {
    // Perfect detection, no clutter, and detections narrow enough that
    // neighboring targets stay separated after the GA's power inflation.
    // (At the benchmark width of 100 the 20/40 pair genuinely blends under
    // the GA: their spacing is two sigma.)
    ScenarioSpec spec = ScenarioSpec::fig6_preset(31337);
    spec.detection_prob = 1.0;
    spec.clutter_rate = 0.0;
    spec.detection_variance = 9.0;
    const auto reports = generate(spec);
    const FusionWeights w = FusionWeights::uniform(6);
    const ReduceParams red{1e-5, 4.0, 100};
    for (FuseRule rule : {FuseRule::aa, FuseRule::ga}) {
        const GaussianMixture fused = fuse_scenario(reports, rule, w, red);
        const ScoreResult sc = score(fused, ExtractionRule::by_rank(5), spec.target_positions,
                                     3.0 * spec.measurement_noise_std);
        CHECK(sc.n_found == 5);
        CHECK(sc.n_false == 0);
    }
}

TEST_CASE("AA covers every detected target; partial misses weigh less under GA") {
    const FusionWeights w = FusionWeights::uniform(6);
    const ReduceParams red{1e-5, 1.0, 100};
    double aa_partial = 0.0, ga_partial = 0.0;
    int n_partial = 0;
    for (int t = 0; t < 20; ++t) {
        const ScenarioSpec spec = ScenarioSpec::fig6_preset(derive_seed(0xC0FE, t));
        const auto reports = generate(spec);
        std::vector<int> detections(spec.target_positions.size(), 0);
        for (const SensorReport& r : reports)
            for (const ComponentOrigin& o : r.origins)
                if (!o.is_clutter) ++detections[static_cast<std::size_t>(o.target_index)];

        const GaussianMixture aa = fuse_scenario(reports, FuseRule::aa, w, red);
        const GaussianMixture ga = fuse_scenario(reports, FuseRule::ga, w, red);
        const auto near_weight = [&](const GaussianMixture& gm, double pos) {
            double acc = 0.0;
            for (const GaussianComponent& c : gm.components)
                if (std::abs(c.mean - pos) <= 3.0 * spec.measurement_noise_std) acc += c.weight;
            return acc;
        };
        for (std::size_t i = 0; i < spec.target_positions.size(); ++i) {
            const double pos = spec.target_positions[i];
            if (detections[i] >= 1) CHECK(near_weight(aa, pos) > 0.0);
            if (detections[i] >= 1 && detections[i] < 6) {
                aa_partial += near_weight(aa, pos);
                ga_partial += near_weight(ga, pos);
                ++n_partial;
            }
        }
    }
    REQUIRE(n_partial > 10);
    CHECK(ga_partial < aa_partial);
}

TEST_CASE("component count bookkeeping before reduction") {
    ScenarioSpec spec = ScenarioSpec::fig6_preset(2024);
    spec.n_sensors = 3;
    const auto reports = generate(spec);
    Eigen::Index sum = 0, prod = 1;
    bool any_empty = false;
    for (const SensorReport& r : reports) {
        sum += r.mixture.size();
        prod *= std::max<Eigen::Index>(r.mixture.size(), 1);
        any_empty |= r.mixture.empty();
    }
    REQUIRE(!any_empty);
    std::vector<GaussianMixture> gms;
    for (const SensorReport& r : reports) gms.push_back(r.mixture);
    const FusionWeights w = FusionWeights::uniform(3);
    CHECK(gm_aa(gms, w).size() == sum);
    CHECK(gm_ga_fold(gms, w).size() <= prod);
}

TEST_CASE("ga fold skips a sensor that reported nothing") {
    ScenarioSpec spec = ScenarioSpec::fig6_preset(8);
    spec.n_sensors = 3;
    auto reports = generate(spec);
    reports[1].mixture.components.clear();
    reports[1].origins.clear();
    const ReduceParams red{1e-5, 1.0, 100};
    const GaussianMixture ga =
        fuse_scenario(reports, FuseRule::ga, FusionWeights::uniform(3), red);
    CHECK(!ga.empty());
    // Cardinality consensus over the two sensors that did report.
    const double expect =
        0.5 * (reports[0].mixture.weight_sum() + reports[2].mixture.weight_sum());
    CHECK(ga.weight_sum() == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("score: greedy one-to-one matching inside the gate") {
    GaussianMixture gm;
    gm.components = {{1.0, 20.0, 4.0}};
    const ScoreResult exact = score(gm, ExtractionRule::by_rank(1), {20.0}, 5.0);
    CHECK(exact.n_found == 1);
    CHECK(exact.n_false == 0);
    REQUIRE(exact.position_errors.size() == 1);
    CHECK(exact.position_errors[0] == doctest::Approx(0.0));

    gm.components = {{1.0, 23.0, 4.0}};
    const ScoreResult off = score(gm, ExtractionRule::by_rank(1), {20.0}, 5.0);
    CHECK(off.n_found == 1);
    CHECK(off.position_errors[0] == doctest::Approx(3.0));

    gm.components = {{1.0, 21.0, 4.0}, {0.9, 19.0, 4.0}};
    const ScoreResult dup = score(gm, ExtractionRule::by_rank(2), {20.0}, 5.0);
    CHECK(dup.n_found == 1);
    CHECK(dup.n_false == 1);
    REQUIRE(dup.position_errors.size() == 1);
    CHECK(dup.position_errors[0] == doctest::Approx(1.0));
}

TEST_CASE("assessment separates missed targets from surviving clutter") {
    GaussianMixture fused;
    fused.components = {{0.8, 20.0, 100.0},   // covers target 20
                        {0.05, 150.0, 150.0},  // near a clutter draw
                        {0.001, 70.0, 100.0}}; // below the significance floor
    const std::vector<double> truth{20.0, 70.0};
    const std::vector<double> clutter{151.0};
    const TrialAssessment a = assess_trial(fused, truth, clutter, 10.0, 0.01);
    CHECK(a.missed_targets == 1);    // target 70 only covered by sub-floor mass
    CHECK(a.clutter_survivors == 1); // the 150 component
}

TEST_CASE("sign test tail probabilities") {
    CHECK(sign_test_p_one_sided(0, 0) == doctest::Approx(1.0));
    CHECK(sign_test_p_one_sided(1, 1) == doctest::Approx(0.75));
    CHECK(sign_test_p_one_sided(10, 0) == doctest::Approx(std::pow(0.5, 10)).epsilon(1e-12));
    // Binomial(20, 1/2) upper tail at 15: sum_{k>=15} C(20,k)/2^20.
    CHECK(sign_test_p_one_sided(15, 5) == doctest::Approx(21700.0 / 1048576.0).epsilon(1e-12));
}

TEST_CASE("ga direction over a small seeded batch: misses grow, clutter shrinks") {
    const int trials = 60;
    const FusionWeights w = FusionWeights::uniform(6);
    const ReduceParams red{1e-5, 1.0, 100};
    int plus = 0, minus = 0;
    double clutter_aa = 0.0, clutter_ga = 0.0;
    for (int t = 0; t < trials; ++t) {
        const ScenarioSpec spec = ScenarioSpec::fig6_preset(derive_seed(0xD12EC7, t));
        const auto reports = generate(spec);
        const auto clutter = clutter_positions(reports);
        const GaussianMixture aa = fuse_scenario(reports, FuseRule::aa, w, red);
        const GaussianMixture ga = fuse_scenario(reports, FuseRule::ga, w, red);
        const TrialAssessment ta = assess_trial(aa, spec.target_positions, clutter, 10.0, 0.01);
        const TrialAssessment tg = assess_trial(ga, spec.target_positions, clutter, 10.0, 0.01);
        if (tg.missed_targets > ta.missed_targets) ++plus;
        if (tg.missed_targets < ta.missed_targets) ++minus;
        clutter_aa += ta.clutter_survivors;
        clutter_ga += tg.clutter_survivors;
    }
    CHECK(plus > 10 * (minus + 1));
    CHECK(clutter_ga < clutter_aa);
}

TEST_SUITE_END();
