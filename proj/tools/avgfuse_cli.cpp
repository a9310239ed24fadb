// Command-line front end: seeded, reproducible AA/GA fusion experiments
// written as CSV/JSON with a self-describing metadata header line.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "avgfuse/ffusion.hpp"
#include "avgfuse/gmfusion.hpp"
#include "avgfuse/montecarlo.hpp"
#include "avgfuse/rng.hpp"
#include "avgfuse/scenario.hpp"
#include "avgfuse/vfusion.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;
using namespace avgfuse;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out.precision(12);
    return out;
}

void write_header(std::ostream& out, const std::string& subcommand, const json& params) {
    json meta;
    meta["tool"] = "avgfuse";
    meta["version"] = kVersion;
    meta["subcommand"] = subcommand;
    meta["params"] = params;
    out << "# " << meta.dump() << "\n";
}

FusionWeights parse_weights(const std::vector<double>& w, int n) {
    if (w.empty()) return FusionWeights::uniform(n);
    if (static_cast<int>(w.size()) != n)
        throw std::runtime_error("expected " + std::to_string(n) + " weights, got " +
                                 std::to_string(w.size()));
    Eigen::ArrayXd arr(n);
    for (int i = 0; i < n; ++i) arr[i] = w[static_cast<std::size_t>(i)];
    return FusionWeights(arr);
}

GaussianMixture fig5_gm1() {
    GaussianMixture gm;
    gm.components = {{0.7, 10.0, 100.0}, {0.6, 50.0, 100.0}, {0.5, 90.0, 200.0}};
    return gm;
}

GaussianMixture fig5_gm2() {
    GaussianMixture gm;
    gm.components = {{0.9, 11.0, 100.0}, {0.8, 52.0, 120.0}};
    return gm;
}

struct VSweepOptions {
    std::string family = "gaussian";
    double mu1 = 50.0, var1 = 100.0, mu2 = 60.0, var2 = 200.0;
    double l1 = 12.0, l2 = 10.0;
    std::vector<double> rho;
    std::vector<double> theta;
    int grid = 99;
    long n = 1000000;
    std::uint64_t seed = 1;
    std::string out;
};

void add_vsweep_options(CLI::App* cmd, VSweepOptions& o) {
    cmd->add_option("--family", o.family, "sample family: gaussian | poisson")
        ->check(CLI::IsMember({"gaussian", "poisson"}));
    cmd->add_option("--mu1", o.mu1, "gaussian mean of source 1");
    cmd->add_option("--var1", o.var1, "gaussian variance of source 1");
    cmd->add_option("--mu2", o.mu2, "gaussian mean of source 2");
    cmd->add_option("--var2", o.var2, "gaussian variance of source 2");
    cmd->add_option("--l1", o.l1, "poisson rate of source 1");
    cmd->add_option("--l2", o.l2, "poisson rate of source 2");
    cmd->add_option("--rho", o.rho, "target correlation(s)");
    cmd->add_option("--grid", o.grid, "number of interior weight grid points");
    cmd->add_option("--n", o.n, "samples per correlation");
    cmd->add_option("--seed", o.seed, "rng seed");
    cmd->add_option("--out", o.out, "output CSV path")->required();
}

CorrelatedPairSpec make_spec(const VSweepOptions& o, double rho) {
    if (o.family == "poisson")
        return CorrelatedPairSpec::poisson(o.l1, o.l2, rho, o.n, o.seed);
    return CorrelatedPairSpec::truncated_gaussian(o.mu1, o.var1, o.mu2, o.var2, rho, o.n, o.seed);
}

json vsweep_params(const VSweepOptions& o) {
    json p;
    p["family"] = o.family;
    if (o.family == "poisson") {
        p["l1"] = o.l1;
        p["l2"] = o.l2;
    } else {
        p["mu1"] = o.mu1;
        p["var1"] = o.var1;
        p["mu2"] = o.mu2;
        p["var2"] = o.var2;
    }
    p["rho"] = o.rho;
    p["grid"] = o.grid;
    p["n"] = o.n;
    p["seed"] = o.seed;
    return p;
}

int run_v_var(VSweepOptions& o) {
    if (o.rho.empty()) o.rho = {0.0, 0.4, 0.70846};
    std::ofstream out = open_out(o.out);
    write_header(out, "v-var", vsweep_params(o));
    out << "rho_target,rho_achieved,omega1,aa_mean,aa_var,ga_mean,ga_var\n";
    for (double rho : o.rho) {
        const SweepResult r = sweep_weights(make_spec(o, rho), TruthContext{0.0}, o.grid);
        for (int k = 0; k < o.grid; ++k)
            out << rho << ',' << r.achieved_rho << ',' << r.omega1[k] << ',' << r.aa_mean[k]
                << ',' << r.aa_var[k] << ',' << r.ga_mean[k] << ',' << r.ga_var[k] << '\n';
    }
    return 0;
}

int run_v_mse(VSweepOptions& o) {
    if (o.rho.empty()) o.rho = {0.0, 0.70736};
    if (o.theta.empty()) o.theta = {45.0, 55.0, 65.0};
    std::ofstream out = open_out(o.out);
    json params = vsweep_params(o);
    params["theta"] = o.theta;
    write_header(out, "v-mse", params);
    out << "rho_target,rho_achieved,theta,omega1,aa_mean,aa_var,aa_mse,aa_mse_closed,"
           "ga_mean,ga_var,ga_mse\n";
    for (double rho : o.rho) {
        const PairSample p = sample_pairs(make_spec(o, rho));
        for (double theta : o.theta) {
            const SweepResult r = sweep_from_samples(p.s1, p.s2, TruthContext{theta}, o.grid);
            // Closed-form overlay through the empirical error correlation.
            const double beta = empirical_mse_correlation(p.s1, p.s2, theta);
            const double m1 = (theta - p.s1).square().mean();
            const double m2 = (theta - p.s2).square().mean();
            for (int k = 0; k < o.grid; ++k) {
                const double closed = aa_mse_two(m1, m2, MseCorrelation(beta),
                                                 FusionWeights::pair(r.omega1[k]));
                out << rho << ',' << p.achieved_rho << ',' << theta << ',' << r.omega1[k] << ','
                    << r.aa_mean[k] << ',' << r.aa_var[k] << ',' << r.aa_mse[k] << ',' << closed
                    << ',' << r.ga_mean[k] << ',' << r.ga_var[k] << ',' << r.ga_mse[k] << '\n';
            }
        }
    }
    return 0;
}

int run_f_surface(const std::string& preset, double mu1, double var1, double mu2, double var2,
                  double theta_min, double theta_max, int theta_steps, int w_steps,
                  const std::string& out_path) {
    if (preset == "fig3") {
        mu1 = 50.0; var1 = 100.0; mu2 = 60.0; var2 = 200.0;
    } else if (preset == "fig4") {
        mu1 = 50.0; var1 = 400.0; mu2 = 60.0; var2 = 200.0;
    }
    const Gaussian1D g1(mu1, var1), g2(mu2, var2);
    std::ofstream out = open_out(out_path);
    json params{{"mu1", mu1}, {"var1", var1}, {"mu2", mu2},
                {"var2", var2}, {"theta_min", theta_min}, {"theta_max", theta_max},
                {"theta_steps", theta_steps}, {"w_steps", w_steps}};
    if (!preset.empty()) params["preset"] = preset;
    write_header(out, "f-surface", params);
    out << "theta,omega1,aa_var,ga_var,aa_mse,ga_mse\n";
    for (const FusionSurfacePoint& p :
         fusion_surface(g1, g2, theta_min, theta_max, theta_steps, w_steps))
        out << p.theta << ',' << p.omega1 << ',' << p.aa_variance << ',' << p.ga_variance << ','
            << p.aa_mse << ',' << p.ga_mse << '\n';
    return 0;
}

std::vector<GaussianMixture> load_mixtures(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    const json j = json::parse(in);
    if (!j.is_array() || j.empty())
        throw std::runtime_error("expected a JSON array of mixtures");
    std::vector<GaussianMixture> gms;
    for (const json& m : j) gms.push_back(gm_from_json(m.dump()));
    return gms;
}

int run_gm_fuse(const std::string& input, const std::string& preset, const std::string& rule,
                const std::vector<double>& weights, bool do_reduce, const ReduceParams& red,
                double grid_min, double grid_max, Eigen::Index grid_points,
                const std::string& out_prefix) {
    std::vector<GaussianMixture> gms;
    if (preset == "fig5") {
        gms = {fig5_gm1(), fig5_gm2()};
    } else if (!input.empty()) {
        gms = load_mixtures(input);
    } else {
        throw std::runtime_error("gm-fuse needs --input or --preset fig5");
    }
    GaussianMixture fused;
    std::vector<double> used_weights;
    if (gms.size() == 1) {
        fused = gms[0];  // identity: nothing to fuse
        used_weights = {1.0};
    } else {
        const FusionWeights w = parse_weights(weights, static_cast<int>(gms.size()));
        used_weights.assign(w.values().begin(), w.values().end());
        if (rule == "aa") {
            fused = gm_aa(gms, w);
        } else {
            fused = do_reduce ? gm_ga_fold(gms, w, &red) : gm_ga_fold(gms, w);
        }
    }
    if (do_reduce) fused = reduce(fused, red);

    std::ofstream jf = open_out(out_prefix + ".json");
    jf << gm_to_json(fused) << "\n";

    // Auto grid: six sigma around the inputs unless overridden.
    if (grid_min == 0.0 && grid_max == 0.0) {
        grid_min = std::numeric_limits<double>::infinity();
        grid_max = -std::numeric_limits<double>::infinity();
        for (const GaussianMixture& gm : gms)
            for (const GaussianComponent& c : gm.components) {
                grid_min = std::min(grid_min, c.mean - 6.0 * std::sqrt(c.variance));
                grid_max = std::max(grid_max, c.mean + 6.0 * std::sqrt(c.variance));
            }
    }

    std::ofstream out = open_out(out_prefix + ".csv");
    json params{{"rule", rule}, {"weights", used_weights}, {"reduce", do_reduce},
                {"grid_min", grid_min}, {"grid_max", grid_max}, {"grid_points", grid_points}};
    if (!preset.empty()) params["preset"] = preset;
    if (!input.empty()) params["input"] = input;
    if (do_reduce)
        params["reduction"] = {{"prune", red.prune_threshold}, {"merge", red.merge_threshold},
                               {"max_components", red.max_components}};
    write_header(out, "gm-fuse", params);
    out << "x";
    for (std::size_t i = 0; i < gms.size(); ++i) out << ",input_" << (i + 1);
    out << ",fused\n";
    const double h = (grid_max - grid_min) / static_cast<double>(grid_points - 1);
    for (Eigen::Index i = 0; i < grid_points; ++i) {
        const double x = grid_min + h * static_cast<double>(i);
        out << x;
        for (const GaussianMixture& gm : gms) out << ',' << gm.density(x);
        out << ',' << fused.density(x) << '\n';
    }
    return 0;
}

int run_scenario(const std::string& config, const std::string& preset, const std::string& rule,
                 int trials, std::uint64_t seed, double gate, double floor,
                 const ReduceParams& red, const std::string& out_path,
                 const std::string& dump_dir) {
    ScenarioSpec base;
    if (preset == "fig6") {
        base = ScenarioSpec::fig6_preset(seed);
    } else if (!config.empty()) {
        std::ifstream in(config);
        if (!in) throw std::runtime_error("cannot open config file: " + config);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        base = ScenarioSpec::from_json(text);
        base.seed = seed;
    } else {
        throw std::runtime_error("scenario needs --config or --preset fig6");
    }
    if (trials < 1) throw std::runtime_error("scenario: trials must be >= 1");

    std::vector<FuseRule> rules;
    if (rule == "aa") rules = {FuseRule::aa};
    else if (rule == "ga") rules = {FuseRule::ga};
    else rules = {FuseRule::aa, FuseRule::ga};

    std::ofstream out = open_out(out_path);
    json params = json::parse(base.to_json());
    params["rule"] = rule;
    params["trials"] = trials;
    params["gate"] = gate;
    params["weight_floor"] = floor;
    params["reduction"] = {{"prune", red.prune_threshold}, {"merge", red.merge_threshold},
                           {"max_components", red.max_components}};
    write_header(out, "scenario", params);
    out << "trial,rule,seed,n_found,n_false,missed_targets,clutter_survivors,mean_abs_error\n";

    for (int t = 0; t < trials; ++t) {
        ScenarioSpec spec = base;
        spec.seed = derive_seed(seed, static_cast<std::uint64_t>(t));
        const auto reports = generate(spec);
        const auto clutter = clutter_positions(reports);
        for (FuseRule r : rules) {
            const GaussianMixture fused = fuse_scenario_unweighted(reports, r, red);
            const int rank = static_cast<int>(std::lround(fused.weight_sum()));
            const ScoreResult sc =
                score(fused, ExtractionRule::by_rank(rank), spec.target_positions, gate);
            const TrialAssessment ta =
                assess_trial(fused, spec.target_positions, clutter, gate, floor);
            const double mean_err =
                sc.position_errors.empty()
                    ? 0.0
                    : std::accumulate(sc.position_errors.begin(), sc.position_errors.end(), 0.0) /
                          static_cast<double>(sc.position_errors.size());
            out << t << ',' << (r == FuseRule::aa ? "aa" : "ga") << ',' << spec.seed << ','
                << sc.n_found << ',' << sc.n_false << ',' << ta.missed_targets << ','
                << ta.clutter_survivors << ',' << mean_err << '\n';
            if (!dump_dir.empty()) {
                std::filesystem::create_directories(dump_dir);
                std::ofstream gf(dump_dir + "/trial_" + std::to_string(t) + "_" +
                                 (r == FuseRule::aa ? "aa" : "ga") + ".json");
                gf << gm_to_json(fused) << "\n";
            }
        }
        if (!dump_dir.empty()) {
            for (const SensorReport& rep : reports) {
                std::ofstream sf(dump_dir + "/trial_" + std::to_string(t) + "_sensor_" +
                                 std::to_string(rep.sensor_id) + ".json");
                sf << gm_to_json(rep.mixture) << "\n";
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"arithmetic vs geometric average fusion experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("avgfuse ") + kVersion);

    VSweepOptions vvar, vmse;
    CLI::App* c_vvar = app.add_subcommand("v-var", "AA/GA mean and variance over a weight sweep");
    add_vsweep_options(c_vvar, vvar);
    CLI::App* c_vmse = app.add_subcommand("v-mse", "AA/GA mse over a weight sweep");
    add_vsweep_options(c_vmse, vmse);
    c_vmse->add_option("--theta", vmse.theta, "true value(s)");

    std::string fs_preset;
    double fs_mu1 = 50.0, fs_var1 = 100.0, fs_mu2 = 60.0, fs_var2 = 200.0;
    double fs_tmin = 40.0, fs_tmax = 80.0;
    int fs_tsteps = 41, fs_wsteps = 99;
    std::string fs_out;
    CLI::App* c_fs = app.add_subcommand("f-surface", "analytic AA/GA variance and mse surface");
    c_fs->add_option("--preset", fs_preset, "fig3 (100/200) or fig4 (400/200)")
        ->check(CLI::IsMember({"fig3", "fig4"}));
    c_fs->add_option("--mu1", fs_mu1, "mean of source 1");
    c_fs->add_option("--var1", fs_var1, "variance of source 1");
    c_fs->add_option("--mu2", fs_mu2, "mean of source 2");
    c_fs->add_option("--var2", fs_var2, "variance of source 2");
    c_fs->add_option("--theta-min", fs_tmin, "theta range start");
    c_fs->add_option("--theta-max", fs_tmax, "theta range end");
    c_fs->add_option("--theta-steps", fs_tsteps, "theta grid size");
    c_fs->add_option("--w-steps", fs_wsteps, "weight grid size");
    c_fs->add_option("--out", fs_out, "output CSV path")->required();

    std::string gm_input, gm_preset, gm_rule = "aa", gm_out;
    std::vector<double> gm_w;
    bool gm_reduce = false;
    ReduceParams gm_red;
    double gm_gmin = 0.0, gm_gmax = 0.0;
    Eigen::Index gm_gpoints = 2001;
    CLI::App* c_gm = app.add_subcommand("gm-fuse", "fuse gaussian mixtures and tabulate densities");
    c_gm->add_option("--input", gm_input, "JSON file: array of mixtures");
    c_gm->add_option("--preset", gm_preset, "fig5 benchmark pair")->check(CLI::IsMember({"fig5"}));
    c_gm->add_option("--rule", gm_rule, "aa | ga")->check(CLI::IsMember({"aa", "ga"}));
    c_gm->add_option("--w", gm_w, "fusion weights (default: uniform)");
    c_gm->add_flag("--reduce", gm_reduce, "apply mixture reduction");
    c_gm->add_option("--prune", gm_red.prune_threshold, "reduction prune threshold");
    c_gm->add_option("--merge", gm_red.merge_threshold,
                     "reduction merge threshold (sq. Mahalanobis)");
    c_gm->add_option("--max-components", gm_red.max_components, "reduction component cap");
    c_gm->add_option("--grid-min", gm_gmin, "density grid start (default: auto)");
    c_gm->add_option("--grid-max", gm_gmax, "density grid end (default: auto)");
    c_gm->add_option("--grid-points", gm_gpoints, "density grid size");
    c_gm->add_option("--out", gm_out, "output prefix (.json and .csv)")->required();

    std::string sc_config, sc_preset, sc_rule = "both", sc_out, sc_dump;
    int sc_trials = 1;
    std::uint64_t sc_seed = 1;
    double sc_gate = 10.0, sc_floor = 0.01;
    ReduceParams sc_red{1e-5, 1.0, 100};
    CLI::App* c_sc = app.add_subcommand("scenario", "multi-sensor detection scenario trials");
    c_sc->add_option("--config", sc_config, "scenario spec JSON file");
    c_sc->add_option("--preset", sc_preset, "fig6 benchmark scenario")
        ->check(CLI::IsMember({"fig6"}));
    c_sc->add_option("--rule", sc_rule, "aa | ga | both")
        ->check(CLI::IsMember({"aa", "ga", "both"}));
    c_sc->add_option("--trials", sc_trials, "number of seeded trials");
    c_sc->add_option("--seed", sc_seed, "base seed (trial t runs at a derived seed)");
    c_sc->add_option("--gate", sc_gate, "match gate for scoring");
    c_sc->add_option("--floor", sc_floor, "weight floor for component diagnostics");
    c_sc->add_option("--prune", sc_red.prune_threshold, "reduction prune threshold");
    c_sc->add_option("--merge", sc_red.merge_threshold, "reduction merge threshold");
    c_sc->add_option("--max-components", sc_red.max_components, "reduction component cap");
    c_sc->add_option("--out", sc_out, "output CSV path")->required();
    c_sc->add_option("--dump-dir", sc_dump, "also dump per-trial mixtures as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (c_vvar->parsed()) return run_v_var(vvar);
        if (c_vmse->parsed()) return run_v_mse(vmse);
        if (c_fs->parsed())
            return run_f_surface(fs_preset, fs_mu1, fs_var1, fs_mu2, fs_var2, fs_tmin, fs_tmax,
                                 fs_tsteps, fs_wsteps, fs_out);
        if (c_gm->parsed())
            return run_gm_fuse(gm_input, gm_preset, gm_rule, gm_w, gm_reduce, gm_red, gm_gmin,
                               gm_gmax, gm_gpoints, gm_out);
        if (c_sc->parsed())
            return run_scenario(sc_config, sc_preset, sc_rule, sc_trials, sc_seed, sc_gate,
                                sc_floor, sc_red, sc_out, sc_dump);
    } catch (const std::exception& e) {
        std::cerr << "avgfuse: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
