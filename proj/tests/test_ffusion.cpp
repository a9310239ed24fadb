#include <array>
#include <cmath>

#include "doctest.h"

#include "avgfuse/ffusion.hpp"
#include "avgfuse/rng.hpp"

using namespace avgfuse;

TEST_SUITE_BEGIN("ffusion");

namespace {
double rnd(std::uint64_t stream, std::uint64_t ctr, double lo, double hi) {
    return lo + (hi - lo) * uniform_double(0xFEED, stream, ctr);
}
}  // namespace

TEST_CASE("gaussian AA moments") {
    const MomentSummary m =
        gaussian_aa_moments(Gaussian1D(50.0, 100.0), Gaussian1D(60.0, 200.0), {0.5, 0.5});
    CHECK(m.mean == doctest::Approx(55.0));
    CHECK(m.variance == doctest::Approx(175.0));

    const MomentSummary same =
        gaussian_aa_moments(Gaussian1D(3.0, 7.0), Gaussian1D(3.0, 7.0), {0.25, 0.75});
    CHECK(same.mean == doctest::Approx(3.0));
    CHECK(same.variance == doctest::Approx(7.0));

    const MomentSummary spread =
        gaussian_aa_moments(Gaussian1D(0.0, 1.0), Gaussian1D(10.0, 1.0), {0.5, 0.5});
    CHECK(spread.variance == doctest::Approx(26.0));
}

TEST_CASE("gaussian GA is the covariance-intersection form") {
    const Gaussian1D g = gaussian_ga(Gaussian1D(50.0, 100.0), Gaussian1D(60.0, 200.0), {0.5, 0.5});
    CHECK(g.mean() == doctest::Approx(160.0 / 3.0).epsilon(1e-12));
    CHECK(g.variance() == doctest::Approx(400.0 / 3.0).epsilon(1e-12));

    const Gaussian1D same = gaussian_ga(Gaussian1D(3.0, 7.0), Gaussian1D(3.0, 7.0), {0.3, 0.7});
    CHECK(same.mean() == doctest::Approx(3.0));
    CHECK(same.variance() == doctest::Approx(7.0));

    const Gaussian1D near1 =
        gaussian_ga(Gaussian1D(50.0, 100.0), Gaussian1D(60.0, 200.0), FusionWeights::pair(1.0 - 1e-9));
    CHECK(near1.mean() == doctest::Approx(50.0).epsilon(1e-7));
    CHECK(near1.variance() == doctest::Approx(100.0).epsilon(1e-7));
}

TEST_CASE("gaussian AA mse decomposes per source") {
    const Gaussian1D g1(50.0, 100.0), g2(60.0, 200.0);
    const MseBreakdown b = gaussian_aa_mse(g1, g2, {0.5, 0.5}, TruthContext{55.0});
    CHECK(b.total == doctest::Approx(175.0));
    CHECK(b.variance_part == doctest::Approx(150.0));
    CHECK(b.bias_sq_part == doctest::Approx(25.0));

    const MseBreakdown unb = gaussian_aa_mse(Gaussian1D(5.0, 9.0), Gaussian1D(5.0, 9.0),
                                             {0.5, 0.5}, TruthContext{5.0});
    CHECK(unb.total == doctest::Approx(9.0));

    CHECK(gaussian_aa_mse(g1, g2, {0.5, 0.5}, TruthContext{45.0}).total == doctest::Approx(275.0));
}

TEST_CASE("gaussian GA mse decomposes into CI variance plus blended bias") {
    const Gaussian1D g1(50.0, 100.0), g2(60.0, 200.0);
    const MseBreakdown b = gaussian_ga_mse(g1, g2, {0.5, 0.5}, TruthContext{55.0});
    CHECK(b.variance_part == doctest::Approx(400.0 / 3.0).epsilon(1e-12));
    CHECK(b.bias_sq_part == doctest::Approx(25.0 / 9.0).epsilon(1e-12));
    CHECK(b.total == doctest::Approx(400.0 / 3.0 + 25.0 / 9.0).epsilon(1e-12));

    // Unbiased identical inputs: mse hits the floor min(S1,S2).
    const MseBreakdown floor = gaussian_ga_mse(Gaussian1D(5.0, 9.0), Gaussian1D(5.0, 9.0),
                                               {0.5, 0.5}, TruthContext{5.0});
    CHECK(floor.total == doctest::Approx(9.0));

    // Equal variances: GA bias is the weighted bias, never above the AA's part.
    for (int t = 0; t < 200; ++t) {
        const double P = rnd(t, 0, 1.0, 100.0);
        const Gaussian1D a(rnd(t, 1, -20.0, 20.0), P), c(rnd(t, 2, -20.0, 20.0), P);
        const double w1 = rnd(t, 3, 0.05, 0.95);
        const TruthContext truth{rnd(t, 4, -25.0, 25.0)};
        const FusionWeights w = FusionWeights::pair(w1);
        const MseBreakdown ga = gaussian_ga_mse(a, c, w, truth);
        const MseBreakdown aa = gaussian_aa_mse(a, c, w, truth);
        const double xi1 = a.mean() - truth.theta, xi2 = c.mean() - truth.theta;
        const double blended = w1 * xi1 + (1.0 - w1) * xi2;
        CHECK(ga.bias_sq_part == doctest::Approx(blended * blended).epsilon(1e-9));
        CHECK(ga.bias_sq_part <= aa.bias_sq_part * (1.0 + 1e-12));
        CHECK(ga.total <= aa.total * (1.0 + 1e-12));
    }
}

TEST_CASE("grid AA: identity, support union, unbiasedness") {
    const GridDensity d1 = GridDensity::gaussian(Gaussian1D(50.0, 100.0), -40.0, 150.0, 4001);
    const std::array<GridDensity, 2> same{d1, d1};
    const GridDensity fused = grid_aa(same, FusionWeights({0.5, 0.5}));
    CHECK((fused.values() - d1.values()).abs().maxCoeff() < 1e-12);

    // Disjoint supports: result covers the union.
    const GridDensity left =
        GridDensity::tabulate(0.0, 10.0, 2001, [](double x) { return x < 4.0 ? 1.0 : 0.0; });
    const GridDensity right =
        GridDensity::tabulate(0.0, 10.0, 2001, [](double x) { return x > 6.0 ? 1.0 : 0.0; });
    const std::array<GridDensity, 2> lr{left, right};
    const GridDensity u = grid_aa(lr, FusionWeights({0.3, 0.7}));
    CHECK(u.values()[798] > 0.0);       // x ~ 3.99 comes from the left block
    CHECK(u.values()[1600] > 0.0);      // x = 8 comes from the right block
    CHECK(u.values()[1000] == 0.0);     // the gap stays empty

    // Mismatched grids are rejected.
    const GridDensity other = GridDensity::gaussian(Gaussian1D(50.0, 100.0), -40.0, 151.0, 4001);
    const std::array<GridDensity, 2> bad{d1, other};
    CHECK_THROWS_AS(grid_aa(bad, FusionWeights({0.5, 0.5})), std::invalid_argument);
}

TEST_CASE("grid GA: intersection support and closed-form agreement") {
    const GridDensity d1 = GridDensity::gaussian(Gaussian1D(50.0, 100.0), -40.0, 160.0, 8001);
    const GridDensity d2 = GridDensity::gaussian(Gaussian1D(60.0, 200.0), -40.0, 160.0, 8001);
    const std::array<GridDensity, 2> ds{d1, d2};
    const GridDensity fused = grid_ga(ds, FusionWeights({0.5, 0.5}));
    const MomentSummary m = moments_of_grid(fused);
    const Gaussian1D oracle = gaussian_ga(Gaussian1D(50.0, 100.0), Gaussian1D(60.0, 200.0), {0.5, 0.5});
    CHECK(std::abs(m.mean - oracle.mean()) < 1e-2);
    CHECK(std::abs(m.variance - oracle.variance()) < 1e-2);

    const std::array<GridDensity, 2> same{d1, d1};
    const GridDensity idem = grid_ga(same, FusionWeights({0.5, 0.5}));
    CHECK((idem.values() - d1.values()).abs().maxCoeff() < 1e-9);

    const GridDensity left =
        GridDensity::tabulate(0.0, 10.0, 2001, [](double x) { return x < 4.0 ? 1.0 : 0.0; });
    const GridDensity right =
        GridDensity::tabulate(0.0, 10.0, 2001, [](double x) { return x > 6.0 ? 1.0 : 0.0; });
    const std::array<GridDensity, 2> lr{left, right};
    CHECK_THROWS_WITH_AS(grid_ga(lr, FusionWeights({0.5, 0.5})),
                         "GA undefined: disjoint supports", std::invalid_argument);

    // Nearly disjoint supports: the product mass collapses and the raw,
    // unnormalized product is returned.
    const GridDensity l2 = GridDensity::tabulate(
        0.0, 10.0, 2001, [](double x) { return x < 4.0 ? 1.0 : 1e-200; });
    const GridDensity r2 = GridDensity::tabulate(
        0.0, 10.0, 2001, [](double x) { return x > 6.0 ? 1.0 : 1e-200; });
    const std::array<GridDensity, 2> lr2{l2, r2};
    const GridDensity tiny = grid_ga(lr2, FusionWeights({0.5, 0.5}));
    CHECK(!tiny.is_normalized());
    CHECK(tiny.integral() < 1e-12);
}

TEST_CASE("uniform x triangular pair: AA stays unbiased, GA does not") {
    // f1 uniform on (0, 4*sqrt(2)/3], f2(x) = x on (0, sqrt(2)]; both unbiased
    // for theta = 2*sqrt(2)/3. Their equal-weight GA has mean 3*sqrt(2)/5.
    const double theta = 2.0 * std::sqrt(2.0) / 3.0;
    const double hi = 4.0 * std::sqrt(2.0) / 3.0;
    const double f1_height = 3.0 * std::sqrt(2.0) / 8.0;
    const GridDensity f1 = GridDensity::tabulate(
        0.0, hi, 4001, [&](double x) { return x > 0.0 ? f1_height : 0.0; });
    const GridDensity f2 = GridDensity::tabulate(
        0.0, hi, 4001, [&](double x) { return (x > 0.0 && x <= std::sqrt(2.0)) ? x : 0.0; });
    CHECK(moments_of_grid(f1).mean == doctest::Approx(theta).epsilon(1e-3));
    CHECK(moments_of_grid(f2).mean == doctest::Approx(theta).epsilon(1e-3));

    const std::array<GridDensity, 2> ds{f1, f2};
    const FusionWeights w({0.5, 0.5});
    CHECK(std::abs(moments_of_grid(grid_aa(ds, w)).mean - theta) < 1e-3);
    CHECK(std::abs(moments_of_grid(grid_ga(ds, w)).mean - 3.0 * std::sqrt(2.0) / 5.0) < 1e-3);
}

TEST_CASE("property: variance ordering and bounds for gaussian f-fusion") {
    for (int t = 0; t < 2000; ++t) {
        const Gaussian1D g1(rnd(t, 10, -100.0, 100.0), rnd(t, 11, 1.0, 1000.0));
        const Gaussian1D g2(rnd(t, 12, -100.0, 100.0), rnd(t, 13, 1.0, 1000.0));
        const FusionWeights w = FusionWeights::pair(rnd(t, 14, 1e-6, 1.0 - 1e-6));
        const double lo = std::min(g1.variance(), g2.variance());
        const double hi = std::max(g1.variance(), g2.variance());

        const double aa_var = gaussian_aa_moments(g1, g2, w).variance;
        const double ga_var = gaussian_ga(g1, g2, w).variance();
        CHECK(aa_var >= ga_var * (1.0 - 1e-12));                    // AA spreads more
        CHECK(ga_var >= lo * (1.0 - 1e-12));                        // dual bounds on the GA
        CHECK(ga_var <= hi * (1.0 + 1e-12));
        const double lin = w[0] * g1.variance() + w[1] * g2.variance();
        CHECK(lin >= ga_var * (1.0 - 1e-12));                       // chain through the linear part

        const TruthContext truth{rnd(t, 15, -120.0, 120.0)};
        const MseBreakdown aam = gaussian_aa_mse(g1, g2, w, truth);
        const MseBreakdown gam = gaussian_ga_mse(g1, g2, w, truth);
        const double mse1 = g1.variance() + std::pow(g1.mean() - truth.theta, 2);
        const double mse2 = g2.variance() + std::pow(g2.mean() - truth.theta, 2);
        CHECK(aam.total >= std::min(mse1, mse2) * (1.0 - 1e-12));   // AA mse convexity
        CHECK(aam.total <= std::max(mse1, mse2) * (1.0 + 1e-12));
        CHECK(gam.total >= lo * (1.0 - 1e-12));                     // GA mse floor
        CHECK(gam.variance_part <= aam.variance_part * (1.0 + 1e-12));
    }
}

TEST_CASE("fusion surface tabulates the closed forms") {
    const Gaussian1D g1(50.0, 100.0), g2(60.0, 200.0);
    const auto surface = fusion_surface(g1, g2, 40.0, 80.0, 41, 9);
    CHECK(surface.size() == 41u * 9u);
    // Find theta = 55, omega1 = 0.5.
    bool found = false;
    for (const FusionSurfacePoint& p : surface) {
        if (std::abs(p.theta - 55.0) < 1e-12 && std::abs(p.omega1 - 0.5) < 1e-12) {
            found = true;
            CHECK(p.aa_mse == doctest::Approx(175.0));
            CHECK(p.ga_mse == doctest::Approx(400.0 / 3.0 + 25.0 / 9.0).epsilon(1e-12));
            CHECK(p.aa_variance == doctest::Approx(175.0));
            CHECK(p.ga_variance == doctest::Approx(400.0 / 3.0).epsilon(1e-12));
        }
    }
    CHECK(found);
}

TEST_SUITE_END();
