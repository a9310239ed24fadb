#include "avgfuse/montecarlo.hpp"

#include <cmath>
#include <future>
#include <sstream>
#include <thread>
#include <vector>

#include "avgfuse/rng.hpp"

namespace avgfuse {

CorrelatedPairSpec CorrelatedPairSpec::truncated_gaussian(double mean1, double variance1,
                                                          double mean2, double variance2,
                                                          double target_rho, long n_samples,
                                                          std::uint64_t seed) {
    CorrelatedPairSpec s;
    s.family = Family::truncated_gaussian;
    s.mean1 = mean1;
    s.variance1 = variance1;
    s.mean2 = mean2;
    s.variance2 = variance2;
    s.target_rho = target_rho;
    s.n_samples = n_samples;
    s.seed = seed;
    s.validate();
    return s;
}

CorrelatedPairSpec CorrelatedPairSpec::poisson(double rate1, double rate2, double target_rho,
                                               long n_samples, std::uint64_t seed) {
    CorrelatedPairSpec s;
    s.family = Family::poisson;
    s.rate1 = rate1;
    s.rate2 = rate2;
    s.target_rho = target_rho;
    s.n_samples = n_samples;
    s.seed = seed;
    s.validate();
    return s;
}

void CorrelatedPairSpec::validate() const {
    if (family == Family::truncated_gaussian) {
        if (!(variance1 > 0.0) || !(variance2 > 0.0))
            throw std::invalid_argument("pair spec: variances must be positive");
    } else {
        if (!(rate1 > 0.0) || !(rate2 > 0.0))
            throw std::invalid_argument("pair spec: Poisson rates must be positive");
    }
    if (!(target_rho >= 0.0 && target_rho < 1.0))
        throw std::invalid_argument("pair spec: target correlation must lie in [0,1)");
    if (n_samples < 10000) throw std::invalid_argument("pair spec: need at least 10^4 samples");
}

namespace {

constexpr int kMaxRejectionAttempts = 100000;

// One correlated standard-normal pair per (pair index, attempt).
inline std::array<double, 2> correlated_normals(std::uint64_t seed, std::uint64_t pair_index,
                                                std::uint64_t attempt, double rho) {
    const auto u = uniform_pair(seed, pair_index, attempt);
    const double z1 = normal_quantile(u[0]);
    const double z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * normal_quantile(u[1]);
    return {z1, z2};
}

struct PoissonCalibration {
    static double achieved(double rate1, double rate2, double rho_z) {
        // Fixed-size, fixed-seed NORTA population; only relative behavior in
        // rho_z matters, and the evaluation is monotone in it.
        constexpr long n = 200000;
        constexpr std::uint64_t cal_seed = 0xCA11B7A7E5EEDull;
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        for (long i = 0; i < n; ++i) {
            const auto z = correlated_normals(cal_seed, static_cast<std::uint64_t>(i), 0, rho_z);
            const double x = static_cast<double>(poisson_quantile(normal_cdf(z[0]), rate1));
            const double y = static_cast<double>(poisson_quantile(normal_cdf(z[1]), rate2));
            sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
        }
        const double mx = sx / n, my = sy / n;
        const double vx = sxx / n - mx * mx, vy = syy / n - my * my;
        return (sxy / n - mx * my) / std::sqrt(vx * vy);
    }
};

}  // namespace

double calibrate_poisson_copula(double rate1, double rate2, double target_rho) {
    if (!(target_rho >= 0.0 && target_rho < 1.0))
        throw std::invalid_argument("copula calibration: target must lie in [0,1)");
    if (target_rho == 0.0) return 0.0;
    const double rho_max = 0.999999;
    const double attainable = PoissonCalibration::achieved(rate1, rate2, rho_max);
    if (target_rho > attainable - 0.002) {
        std::ostringstream msg;
        msg << "copula calibration: target correlation " << target_rho
            << " is unattainable for Poisson(" << rate1 << "), Poisson(" << rate2
            << "); attainable range is approximately [0, " << attainable << ")";
        throw std::invalid_argument(msg.str());
    }
    double lo = 0.0, hi = rho_max;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double got = PoissonCalibration::achieved(rate1, rate2, mid);
        if (std::abs(got - target_rho) < 3e-4) return mid;
        (got < target_rho ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

PairSample sample_pairs(const CorrelatedPairSpec& spec) {
    spec.validate();
    const long n = spec.n_samples;
    PairSample out;
    out.s1.resize(n);
    out.s2.resize(n);

    const bool gaussian = spec.family == CorrelatedPairSpec::Family::truncated_gaussian;
    const double rho_z =
        gaussian ? spec.target_rho
                 : calibrate_poisson_copula(spec.rate1, spec.rate2, spec.target_rho);
    const double sd1 = gaussian ? std::sqrt(spec.variance1) : 0.0;
    const double sd2 = gaussian ? std::sqrt(spec.variance2) : 0.0;

    const auto draw_pair = [&](long i) {
        for (int attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
            const auto z = correlated_normals(spec.seed, static_cast<std::uint64_t>(i),
                                              static_cast<std::uint64_t>(attempt), rho_z);
            if (gaussian) {
                const double x1 = spec.mean1 + sd1 * z[0];
                const double x2 = spec.mean2 + sd2 * z[1];
                if (x1 > 0.0 && x2 > 0.0) {
                    out.s1[i] = x1;
                    out.s2[i] = x2;
                    return;
                }
            } else {
                const long k1 = poisson_quantile(normal_cdf(z[0]), spec.rate1);
                const long k2 = poisson_quantile(normal_cdf(z[1]), spec.rate2);
                if (k1 > 0 && k2 > 0) {
                    out.s1[i] = static_cast<double>(k1);
                    out.s2[i] = static_cast<double>(k2);
                    return;
                }
            }
        }
        throw std::runtime_error("sample_pairs: rejection sampling failed to accept");
    };

    // Pair i depends only on (seed, i), so any partition over threads yields
    // the same arrays.
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (hw <= 1 || n < 100000) {
        for (long i = 0; i < n; ++i) draw_pair(i);
    } else {
        std::vector<std::future<void>> tasks;
        const long chunk = (n + hw - 1) / hw;
        for (unsigned t = 0; t < hw; ++t) {
            const long lo = t * chunk;
            const long hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            tasks.push_back(std::async(std::launch::async, [&, lo, hi] {
                for (long i = lo; i < hi; ++i) draw_pair(i);
            }));
        }
        for (auto& f : tasks) f.get();
    }

    out.achieved_rho = pearson_correlation(out.s1, out.s2);
    return out;
}

double pearson_correlation(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("pearson_correlation: arrays must match and hold >= 2 values");
    const double ma = a.mean(), mb = b.mean();
    const Eigen::ArrayXd da = a - ma, db = b - mb;
    return (da * db).sum() / std::sqrt(da.square().sum() * db.square().sum());
}

double empirical_mse_correlation(const Eigen::ArrayXd& s1, const Eigen::ArrayXd& s2,
                                 double theta) {
    const Eigen::ArrayXd e1 = theta - s1, e2 = theta - s2;
    const double m1 = e1.square().mean(), m2 = e2.square().mean();
    return (e1 * e2).mean() / std::sqrt(m1 * m2);
}

SweepResult sweep_from_samples(const Eigen::ArrayXd& s1, const Eigen::ArrayXd& s2,
                               const TruthContext& truth, int grid_size) {
    if (grid_size < 3) throw std::invalid_argument("sweep: grid size must be at least 3");
    if (s1.size() != s2.size() || s1.size() < 2)
        throw std::invalid_argument("sweep: sample arrays must match");
    const long n = s1.size();
    const double theta = truth.theta;

    SweepResult r;
    const int g = grid_size;
    auto init = [&](Eigen::ArrayXd& a) { a.resize(g); };
    init(r.omega1);
    init(r.aa_mean); init(r.aa_var); init(r.aa_var_se); init(r.aa_mse); init(r.aa_mse_se);
    init(r.ga_mean); init(r.ga_var); init(r.ga_var_se); init(r.ga_mse); init(r.ga_mse_se);
    r.achieved_rho = pearson_correlation(s1, s2);

    const Eigen::ArrayXd l1 = s1.log();
    const Eigen::ArrayXd l2 = s2.log();

    const auto eval_point = [&](int k) {
        const double w1 = static_cast<double>(k + 1) / static_cast<double>(g + 1);
        r.omega1[k] = w1;
        const auto stats = [&](const Eigen::ArrayXd& y, double& mean, double& var, double& var_se,
                               double& mse, double& mse_se) {
            mean = y.mean();
            const Eigen::ArrayXd c = y - mean;
            const Eigen::ArrayXd c2 = c.square();
            var = c2.mean();
            const double m4 = c2.square().mean();
            var_se = std::sqrt(std::max(0.0, m4 - var * var) / static_cast<double>(n));
            const Eigen::ArrayXd e2 = (theta - y).square();
            mse = e2.mean();
            mse_se = std::sqrt(std::max(0.0, e2.square().mean() - mse * mse) /
                               static_cast<double>(n));
        };
        stats(w1 * s1 + (1.0 - w1) * s2, r.aa_mean[k], r.aa_var[k], r.aa_var_se[k], r.aa_mse[k],
              r.aa_mse_se[k]);
        stats((w1 * l1 + (1.0 - w1) * l2).exp(), r.ga_mean[k], r.ga_var[k], r.ga_var_se[k],
              r.ga_mse[k], r.ga_mse_se[k]);
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (hw <= 1 || n < 100000) {
        for (int k = 0; k < g; ++k) eval_point(k);
    } else {
        std::vector<std::future<void>> tasks;
        for (unsigned t = 0; t < hw; ++t)
            tasks.push_back(std::async(std::launch::async, [&, t] {
                for (int k = static_cast<int>(t); k < g; k += static_cast<int>(hw)) eval_point(k);
            }));
        for (auto& f : tasks) f.get();
    }
    return r;
}

SweepResult sweep_weights(const CorrelatedPairSpec& spec, const TruthContext& truth,
                          int grid_size) {
    const PairSample p = sample_pairs(spec);
    SweepResult r = sweep_from_samples(p.s1, p.s2, truth, grid_size);
    r.achieved_rho = p.achieved_rho;
    return r;
}

}  // namespace avgfuse
