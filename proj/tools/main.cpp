#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>

#include "shiftgibbs/config.hpp"
#include "shiftgibbs/contraction.hpp"
#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/gibbs.hpp"
#include "shiftgibbs/io.hpp"
#include "shiftgibbs/oracle.hpp"
#include "shiftgibbs/parallel.hpp"
#include "shiftgibbs/potential.hpp"
#include "shiftgibbs/transfer.hpp"
#include "shiftgibbs/wasserstein.hpp"

namespace sg = shiftgibbs;
using nlohmann::json;

namespace {

struct Common {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool reproducible = false;
};

std::string resolve_out(const sg::ExperimentConfig& cfg, const Common& c)
{
    if (!c.out_dir.empty()) return c.out_dir;
    if (const char* env = std::getenv("SHIFTGIBBS_OUT")) return env;
    return cfg.output_dir;
}

int resolve_threads(const Common& c)
{
    return c.threads > 0 ? c.threads : sg::hardware_threads();
}

json verdict_json(sg::Verdict v) { return sg::to_string(v); }

// The potential itself when it already satisfies L(1) = 1, otherwise the
// normalization built from the leading eigenpair.
sg::Potential make_abar(const sg::ExperimentConfig& cfg, int threads, json* info)
{
    const int dim = std::max(1, sg::solver_rank(cfg.potential, cfg.solver.max_rank));
    const std::vector<double> hw(static_cast<std::size_t>(dim), 2.0);
    const auto pts = sg::audit_points(cfg.space, hw, 8, 0x51u);
    const double resid =
        sg::is_normalized_residual(cfg.potential, cfg.apriori, cfg.weights, pts);
    if (resid <= 1e-8) {
        if (info) (*info)["already_normalized_residual"] = resid;
        return cfg.potential;
    }
    sg::EigenOptions eopt;
    eopt.s_schedule = cfg.solver.s_schedule;
    eopt.tol = cfg.solver.tol;
    eopt.threads = threads;
    const sg::GridSpec spec = sg::resolve_grid(cfg);
    const sg::EigenPair pair = sg::eigenpair(cfg.potential, cfg.apriori, cfg.weights, spec, eopt);
    const sg::NormalizedPotential np =
        sg::normalize(cfg.potential, pair.psi, pair.lambda, cfg.weights, cfg.apriori);
    if (info) {
        (*info)["lambda"] = np.lambda;
        (*info)["normalization_residual"] = np.residual;
    }
    return np.abar;
}

json run_classify(const sg::ExperimentConfig& cfg)
{
    const int N = std::max(16, cfg.tails.horizon);
    std::optional<double> p;
    if (!cfg.space.is_c0()) p = cfg.space.p;
    const sg::WeightReport rep = sg::weight_report(cfg.weights, cfg.metric.alpha, p, N);
    const sg::RghIndicators ind = sg::rgh_indicators(cfg.weights, N);
    const sg::SummabilityReport sum = sg::summability(cfg.weights, cfg.metric.alpha, N);

    json out;
    out["kind"] = cfg.weights.describe();
    out["horizon"] = N;
    out["d_values"] = rep.d_values;
    out["d_sum_alpha"] = rep.d_sum_alpha;
    out["root_limit"] = rep.root_limit;
    out["spectral_radius"] = rep.spectral_radius;
    out["horizon_truncated"] = rep.horizon_truncated;
    out["flags"] = {{"transitive", verdict_json(rep.flags.transitive)},
                    {"mixing", verdict_json(rep.flags.mixing)},
                    {"freq_hypercyclic", verdict_json(rep.flags.freq_hypercyclic)},
                    {"chaotic", verdict_json(rep.flags.chaotic)},
                    {"pos_expansive", verdict_json(rep.flags.pos_expansive)}};
    out["rgh"] = {{"i_root", ind.i_root},
                  {"i_sum", ind.i_sum},
                  {"i_sup_sum", ind.i_sup_sum},
                  {"consistent", ind.consistent}};
    out["summability"] = {{"partial_sum", sum.partial_sum},
                          {"converges", verdict_json(sum.converges)}};
    if (sum.tail_bound) out["summability"]["tail_bound"] = *sum.tail_bound;
    return out;
}

json run_eigen(const sg::ExperimentConfig& cfg, int threads, const std::string& out_dir)
{
    sg::EigenOptions opt;
    opt.s_schedule = cfg.solver.s_schedule;
    opt.tol = cfg.solver.tol;
    opt.threads = threads;
    const sg::GridSpec spec = sg::resolve_grid(cfg);
    const sg::EigenPair pair = sg::eigenpair(cfg.potential, cfg.apriori, cfg.weights, spec, opt);

    const std::string bin = out_dir + "/eigen_psi.bin";
    sg::write_grid_binary(bin, pair.psi);
    sg::write_json_report(out_dir + "/eigen_psi.meta.json",
                          sg::grid_metadata(pair.psi, "eigen_psi.bin"));

    json out;
    out["lambda"] = pair.lambda;
    out["kappa"] = pair.kappa;
    json trace = json::array();
    for (const auto& kv : pair.kappa_trace) trace.push_back({{"s", kv[0]}, {"kappa_s", kv[1]}});
    out["kappa_trace"] = trace;
    out["residual"] = pair.residual;
    out["power_lambda"] = pair.power_lambda;
    out["lambda_agreement"] = std::fabs(pair.lambda - pair.power_lambda);
    out["grid"] = {{"half_widths", spec.half_widths}, {"sizes", spec.sizes}};
    out["psi_dump"] = "eigen_psi.bin";
    return out;
}

json run_normalize(const sg::ExperimentConfig& cfg, int threads, const std::string& out_dir)
{
    sg::EigenOptions opt;
    opt.s_schedule = cfg.solver.s_schedule;
    opt.tol = cfg.solver.tol;
    opt.threads = threads;
    const sg::GridSpec spec = sg::resolve_grid(cfg);
    const sg::EigenPair pair = sg::eigenpair(cfg.potential, cfg.apriori, cfg.weights, spec, opt);
    const sg::NormalizedPotential np =
        sg::normalize(cfg.potential, pair.psi, pair.lambda, cfg.weights, cfg.apriori);

    sg::write_grid_binary(out_dir + "/normalize_psi.bin", np.psi);
    sg::write_json_report(out_dir + "/normalize_psi.meta.json",
                          sg::grid_metadata(np.psi, "normalize_psi.bin"));

    json out;
    out["lambda"] = np.lambda;
    out["residual"] = np.residual;
    out["psi_dump"] = "normalize_psi.bin";
    out["abar"] = {{"rank", np.abar.rank()},
                   {"sup_bound", np.abar.sup_bound()},
                   {"lip_const", np.abar.lip_const()},
                   {"provenance",
                    np.abar.provenance() == sg::Provenance::declared ? "declared" : "estimated"}};
    return out;
}

json run_gibbs(const sg::ExperimentConfig& cfg, std::uint64_t seed, int threads,
               const std::string& out_dir)
{
    json info;
    const sg::Potential abar = make_abar(cfg, threads, &info);
    const auto [a, c_contr] = sg::resolve_metric_scale(cfg, abar);

    sg::GibbsOptions opt;
    opt.metric = sg::MetricSpec::bounded(a, cfg.metric.alpha);
    opt.w_subsample = cfg.gibbs.w_subsample;
    opt.record_every = cfg.gibbs.record_every;
    opt.push.max_depth = cfg.gibbs.max_depth;
    opt.push.threads = threads;
    opt.w1.threads = threads;

    const sg::Point origin = sg::Point::zero(cfg.space);
    sg::EmpiricalMeasure nu0 = sg::EmpiricalMeasure::dirac(origin, cfg.gibbs.particles);
    std::optional<sg::EmpiricalMeasure> alt;
    if (cfg.gibbs.second_init) {
        alt = sg::EmpiricalMeasure::sampled(cfg.gibbs.particles, 1, cfg.space, seed ^ 0xa1f,
                                            [&](std::uint64_t i) {
                                                sg::SplitMix64 rng =
                                                    sg::substream(seed ^ 0xa1f, 1, i);
                                                Eigen::RowVectorXd row(1);
                                                row[0] = cfg.apriori.sample(rng);
                                                return row;
                                            });
    }
    const sg::GibbsRunReport rep = sg::iterate_to_gibbs(abar, cfg.apriori, cfg.weights, nu0, alt,
                                                        cfg.gibbs.iters, cfg.gibbs.candidates,
                                                        seed, opt);
    if (rep.final_cloud)
        sg::write_particles_jsonl(out_dir + "/gibbs_particles.jsonl", *rep.final_cloud);

    json out = info;
    out["metric"] = {{"a", a}, {"alpha", cfg.metric.alpha}, {"c_contr", c_contr},
                     {"a_rule", "max(8*c_contr/3, 1)"}};
    out["particles"] = rep.particles;
    out["iters"] = rep.iters;
    out["candidates"] = rep.candidates;
    out["recorded_gens"] = rep.recorded_gens;
    out["w_trace"] = rep.w_trace;
    out["uniqueness_trace"] = rep.uniqueness_trace;
    out["invariance_gap"] = rep.invariance_gap;
    out["max_dropped_tail"] = rep.max_dropped_tail;
    json mix = json::array();
    for (const auto& kv : rep.mixing_trace) mix.push_back({{"n", kv[0]}, {"corr", kv[1]}});
    out["mixing_trace"] = mix;
    json stds = json::array();
    if (rep.final_cloud)
        for (int k = 0; k < std::min(4, rep.final_cloud->depth()); ++k)
            stds.push_back(rep.final_cloud->coord_std(k));
    out["coord_std"] = stds;
    out["particle_dump"] = "gibbs_particles.jsonl";
    return out;
}

json run_wasserstein(const sg::ExperimentConfig& cfg, int threads, const std::string& mu_path,
                     const std::string& nu_path)
{
    const sg::EmpiricalMeasure mu = sg::read_particles_jsonl(mu_path, cfg.space);
    const sg::EmpiricalMeasure nu = sg::read_particles_jsonl(nu_path, cfg.space);
    double a = cfg.metric.a;
    if (cfg.metric.auto_a) {
        json info;
        const sg::Potential abar = make_abar(cfg, threads, &info);
        a = sg::resolve_metric_scale(cfg, abar).first;
    }
    sg::W1Options opt;
    opt.threads = threads;
    const sg::W1Result res =
        sg::w1(mu, nu, sg::MetricSpec::bounded(a, cfg.metric.alpha), opt);
    json out;
    out["value"] = res.value;
    out["metric"] = {{"a", a}, {"alpha", cfg.metric.alpha}};
    out["method"] = res.plan.method == sg::TransportPlan::Method::exact_assignment
                        ? "exact_assignment"
                        : "entropic";
    if (res.plan.method == sg::TransportPlan::Method::entropic) {
        out["eps_reg"] = res.plan.eps_reg;
        out["dual_gap"] = res.plan.dual_gap;
    }
    return out;
}

json run_contract(const sg::ExperimentConfig& cfg, std::uint64_t seed, int threads)
{
    json info;
    const sg::Potential abar = make_abar(cfg, threads, &info);
    sg::ContractionOptions opt;
    opt.particles = cfg.contract.particles;
    opt.channel = cfg.contract.channel;
    opt.w1.threads = threads;
    opt.push.threads = threads;
    if (!cfg.metric.auto_a) opt.a_override = cfg.metric.a;

    auto mk = [&cfg](const std::vector<double>& c) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(c.size()));
        for (std::size_t i = 0; i < c.size(); ++i) v[static_cast<Eigen::Index>(i)] = c[i];
        return sg::Point(v, cfg.space);
    };
    const sg::Point x = cfg.contract.x.empty() ? sg::Point::zero(cfg.space) : mk(cfg.contract.x);
    const sg::Point y = mk(cfg.contract.y);

    const sg::ContractionReport rep =
        cfg.contract.local
            ? sg::local_contraction_experiment(abar, cfg.apriori, cfg.weights, x, y,
                                               cfg.contract.n, seed, opt)
            : sg::global_contraction_experiment(abar, cfg.apriori, cfg.weights, x, y,
                                                cfg.contract.n, seed, opt);
    json out = info;
    out["mode"] = cfg.contract.local ? "local" : "global";
    out["channel"] = rep.channel;
    out["a"] = rep.a;
    out["c_contr"] = rep.c_contr;
    out["a_rule"] = "max(8*c_contr/3, 1)";
    out["n"] = rep.n;
    out["alpha"] = rep.alpha;
    out["premises"] = {{"dn_small", rep.premise_dn_small}, {"distance", rep.premise_distance}};
    out["D_xy"] = rep.d_xy;
    out["Dtilde_xy"] = rep.dtilde_xy;
    out["measured"] = rep.measured;
    out["measured_ratio"] = rep.measured_ratio;
    out["paper_bound"] = rep.paper_bound;
    out["noise_floor"] = rep.noise_floor;
    out["stat_tol"] = rep.stat_tol;
    out["passes"] = rep.passes;
    return out;
}

json run_tails(const sg::ExperimentConfig& cfg)
{
    const sg::TailReport rep = sg::adapted_tails_check(cfg.apriori, cfg.weights, cfg.space,
                                                       cfg.tails.epsilon, cfg.tails.horizon);
    json out;
    out["epsilon"] = rep.epsilon;
    out["kappa_head"] = std::vector<double>(rep.kappa.begin(),
                                            rep.kappa.begin() + std::min<std::size_t>(
                                                                    rep.kappa.size(), 16));
    out["tail_sum"] = rep.tail_sum;
    out["kappa_in_X"] = verdict_json(rep.kappa_in_X);
    out["verdict"] = verdict_json(rep.verdict);
    try {
        out["fast_criteria"] =
            verdict_json(sg::fast_tail_criteria(cfg.apriori, cfg.weights, cfg.space,
                                                cfg.tails.horizon));
    } catch (const sg::MissingTailClass& e) {
        out["fast_criteria"] = std::string("error: ") + e.what();
    }
    out["full_support"] = cfg.apriori.full_support();
    if (!cfg.apriori.full_support())
        out["support_theorem"] = "inapplicable: a-priori measure is not fully supported";
    return out;
}

json run_oracle_compare(const sg::ExperimentConfig& cfg, int threads)
{
    if (cfg.weights.kind() != sg::WeightSequence::Kind::constant)
        throw sg::UnsupportedKind("oracle-compare: constant weights required");
    const double alpha_w = cfg.weights.value(1);
    const sg::FiniteInstance inst = sg::oracle_build(alpha_w, cfg.apriori, cfg.potential);
    const sg::OracleEigen exact = sg::oracle_exact_eigen(inst);

    sg::EigenOptions opt;
    opt.s_schedule = cfg.solver.s_schedule;
    opt.tol = cfg.solver.tol;
    opt.threads = threads;
    const sg::GridSpec spec = sg::resolve_grid(cfg);
    const sg::EigenPair pair = sg::eigenpair(cfg.potential, cfg.apriori, cfg.weights, spec, opt);

    // Compare eigenfunction ratios at the collocation points, anchored at
    // the oracle's own normalization state.
    std::size_t anchor = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < inst.collocation.size(); ++i) {
        const double n2 = inst.collocation[i].norm();
        if (n2 < best) {
            best = n2;
            anchor = i;
        }
    }
    const double psi_anchor =
        pair.psi.evaluate(inst.collocation[anchor].data(),
                          static_cast<int>(inst.collocation[anchor].size()));
    double worst_psi = 0.0;
    for (std::size_t i = 0; i < inst.collocation.size(); ++i) {
        const double mine = pair.psi.evaluate(inst.collocation[i].data(),
                                              static_cast<int>(inst.collocation[i].size())) /
                            psi_anchor;
        const double theirs = exact.psi[static_cast<Eigen::Index>(i)];
        worst_psi = std::max(worst_psi, std::fabs(mine - theirs) / std::fabs(theirs));
    }

    json out;
    out["states"] = inst.collocation.size();
    out["lambda_oracle"] = exact.lambda;
    out["lambda_transfer"] = pair.lambda;
    out["lambda_abs_diff"] = std::fabs(exact.lambda - pair.lambda);
    out["psi_max_rel_diff"] = worst_psi;
    out["agree_1e8"] = std::fabs(exact.lambda - pair.lambda) <= 1e-8;
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Transfer-operator eigenpairs and Gibbs measures for weighted shifts"};
    app.require_subcommand(1);

    Common c;
    std::string mu_path, nu_path;
    app.add_option("--config", c.config_path, "experiment config (JSON)")->required();
    app.add_option("--out", c.out_dir, "output directory override");
    auto* seed_opt = app.add_option("--seed", c.seed, "seed override");
    app.add_option("--threads", c.threads, "worker threads (default: all cores)");
    app.add_flag("--reproducible", c.reproducible, "omit timestamps from reports");

    auto* classify = app.add_subcommand("classify", "weight analytics and dynamics flags");
    auto* eigen = app.add_subcommand("eigen", "leading eigenpair of the transfer operator");
    auto* normalize = app.add_subcommand("normalize", "normalized potential from the eigenpair");
    auto* gibbs = app.add_subcommand("gibbs", "iterate the dual operator to the Gibbs cloud");
    auto* wasser = app.add_subcommand("wasserstein", "W distance between two particle files");
    wasser->add_option("--mu", mu_path, "first cloud (JSONL)")->required();
    wasser->add_option("--nu", nu_path, "second cloud (JSONL)")->required();
    auto* contract = app.add_subcommand("contract", "appendix contraction experiment");
    bool contract_local = false, contract_global = false;
    contract->add_flag("--local", contract_local, "local Dirac contraction");
    contract->add_flag("--global", contract_global, "global Dirac contraction");
    auto* tails = app.add_subcommand("tails", "adapted-tails construction and fast criteria");
    auto* oracle = app.add_subcommand("oracle-compare", "solver vs exact finite reduction");

    int gibbs_particles = 0, gibbs_iters = -1, gibbs_candidates = 0;
    gibbs->add_option("--particles", gibbs_particles, "particle count override");
    gibbs->add_option("--iters", gibbs_iters, "iteration count override");
    gibbs->add_option("--candidates", gibbs_candidates, "candidate count K override");

    CLI11_PARSE(app, argc, argv);

    try {
        sg::ExperimentConfig cfg = sg::load_config(c.config_path);
        if (gibbs_particles > 0) cfg.gibbs.particles = gibbs_particles;
        if (gibbs_iters >= 0) cfg.gibbs.iters = gibbs_iters;
        if (gibbs_candidates > 0) cfg.gibbs.candidates = gibbs_candidates;
        if (contract_local) cfg.contract.local = true;
        if (contract_global) cfg.contract.local = false;
        const std::uint64_t seed = seed_opt->count() ? c.seed : cfg.gibbs.seed;
        const int threads = resolve_threads(c);
        const std::string out_dir = resolve_out(cfg, c);

        json env = sg::report_envelope(cfg.raw, seed, threads, c.reproducible);
        // Thread count must never influence artifact bytes.
        env.erase("threads");

        json report;
        std::string name;
        if (*classify) {
            report = run_classify(cfg);
            name = "classify";
        } else if (*eigen) {
            report = run_eigen(cfg, threads, out_dir);
            name = "eigen";
        } else if (*normalize) {
            report = run_normalize(cfg, threads, out_dir);
            name = "normalize";
        } else if (*gibbs) {
            report = run_gibbs(cfg, seed, threads, out_dir);
            name = "gibbs";
        } else if (*wasser) {
            report = run_wasserstein(cfg, threads, mu_path, nu_path);
            name = "wasserstein";
        } else if (*contract) {
            report = run_contract(cfg, seed, threads);
            name = "contract";
        } else if (*tails) {
            report = run_tails(cfg);
            name = "tails";
        } else if (*oracle) {
            report = run_oracle_compare(cfg, threads);
            name = "oracle_compare";
        }

        env["subcommand"] = name;
        env["report"] = report;
        const std::string path = out_dir + "/" + name + ".json";
        sg::write_json_report(path, env);
        std::cout << path << "\n";
        return 0;
    } catch (const sg::PremiseViolated& e) {
        std::cerr << "premise violated: " << e.what() << "\n";
        return 2;
    } catch (const sg::ConfigInvalid& e) {
        std::cerr << "config invalid: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
