#include "shiftgibbs/config.hpp"

#include <fstream>

#include "shiftgibbs/errors.hpp"

namespace shiftgibbs {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw ConfigInvalid(path + ": " + what);
}

double need_num(const json& j, const std::string& path, const char* key)
{
    if (!j.contains(key) || !j[key].is_number()) fail(path + "." + key, "number required");
    return j[key].get<double>();
}

double opt_num(const json& j, const char* key, double def)
{
    return j.contains(key) ? j[key].get<double>() : def;
}

std::vector<double> num_list(const json& j, const std::string& path)
{
    if (!j.is_array() || j.empty()) fail(path, "nonempty array required");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) fail(path, "numeric entries required");
        out.push_back(v.get<double>());
    }
    return out;
}

SpaceKind parse_space(const json& j)
{
    if (!j.is_object()) fail("space", "object required");
    const std::string kind = j.value("kind", "lp");
    if (kind == "c0") return SpaceKind::c0();
    if (kind == "lp") return SpaceKind::lp(opt_num(j, "p", 1.0));
    fail("space.kind", "one of c0|lp");
}

WeightSequence parse_weights(const json& j)
{
    if (!j.is_object()) fail("weights", "object required");
    const std::string kind = j.value("kind", "constant");
    std::optional<double> c, cp;
    if (j.contains("c")) c = j["c"].get<double>();
    if (j.contains("c_prime")) cp = j["c_prime"].get<double>();
    const int K = static_cast<int>(opt_num(j, "horizon_K", 64));
    if (kind == "constant")
        return WeightSequence::constant(need_num(j, "weights", "alpha"), c, cp, K);
    if (kind == "periodic")
        return WeightSequence::periodic(num_list(j.value("values", json::array()),
                                                 "weights.values"),
                                        c, cp, K);
    if (kind == "explicit")
        return WeightSequence::explicit_list(
            num_list(j.value("values", json::array()), "weights.values"),
            j.value("eventually_periodic", false), static_cast<int>(opt_num(j, "period", 1)), c,
            cp, K);
    if (kind == "block_family")
        return WeightSequence::block_family(need_num(j, "weights", "a"),
                                            need_num(j, "weights", "b"),
                                            static_cast<int>(need_num(j, "weights", "e")), c, cp,
                                            K);
    fail("weights.kind", "one of constant|periodic|explicit|block_family");
}

AprioriMeasure parse_apriori(const json& j)
{
    if (!j.is_object()) fail("apriori", "object required");
    const std::string kind = j.value("kind", "gaussian");
    AprioriMeasure m = AprioriMeasure::gaussian(0.0, 1.0);
    if (kind == "gaussian") {
        m = AprioriMeasure::gaussian(opt_num(j, "mean", 0.0), opt_num(j, "variance", 1.0),
                                     static_cast<int>(opt_num(j, "quadrature_order", 40)));
    } else if (kind == "student_t") {
        m = AprioriMeasure::student_t(need_num(j, "apriori", "gamma"));
    } else if (kind == "atoms") {
        m = AprioriMeasure::atoms(num_list(j.value("values", json::array()), "apriori.values"),
                                  num_list(j.value("probs", json::array()), "apriori.probs"));
    } else {
        fail("apriori.kind", "one of gaussian|student_t|atoms");
    }
    if (j.value("tail_class", "") == "none") m.clear_tail_class();
    return m;
}

Potential parse_potential(const json& j, const AprioriMeasure& m)
{
    if (!j.is_object()) fail("potential", "object required");
    const std::string kind = j.value("kind", "builtin");
    if (kind == "cylinder") {
        const auto hw = num_list(j.value("half_widths", json::array()), "potential.half_widths");
        std::vector<int> sizes;
        for (const auto& v : j.value("sizes", json::array())) sizes.push_back(v.get<int>());
        GridFunction table(hw, sizes);
        const auto vals = num_list(j.value("values", json::array()), "potential.values");
        if (vals.size() != table.node_count())
            fail("potential.values", "length must match the grid node count");
        for (std::size_t i = 0; i < vals.size(); ++i) table.value(i) = vals[i];
        return Potential::cylinder(std::move(table), opt_num(j, "lip", 1.0),
                                   opt_num(j, "alpha", 1.0));
    }
    if (kind != "builtin") fail("potential.kind", "one of builtin|cylinder");
    const std::string name = j.value("name", "zero");
    const json params = j.value("params", json::object());
    if (name == "zero") return Potential::zero();
    if (name == "constant") return Potential::constant(opt_num(params, "value", 0.0));
    if (name == "quadratic_first_coord")
        return Potential::quadratic_first_coord(opt_num(params, "coeff", -0.25));
    if (name == "gauss_first_coord")
        return Potential::gauss_first_coord(opt_num(params, "amp", 1.0),
                                            opt_num(params, "width", 1.0));
    if (name == "tanh_coords")
        return Potential::tanh_coords(
            num_list(params.value("coeffs", json::array()), "potential.params.coeffs"));
    if (name == "tanh_pair")
        return Potential::tanh_pair(opt_num(params, "c1", 0.3), opt_num(params, "c2", 0.2));
    if (name == "arctan_norm") return Potential::arctan_norm();
    if (name == "tanh_first_normalized")
        return Potential::tanh_first_normalized(opt_num(params, "c", 0.3), m);
    fail("potential.name", "unknown builtin '" + name + "'");
}

} // namespace

ExperimentConfig parse_config(const json& j)
{
    if (!j.is_object()) throw ConfigInvalid("config root must be an object");
    ExperimentConfig cfg;
    cfg.raw = j;
    if (j.contains("space")) cfg.space = parse_space(j["space"]);
    if (j.contains("weights")) cfg.weights = parse_weights(j["weights"]);
    if (j.contains("apriori")) cfg.apriori = parse_apriori(j["apriori"]);
    if (j.contains("potential")) cfg.potential = parse_potential(j["potential"], cfg.apriori);

    if (j.contains("solver")) {
        const json& s = j["solver"];
        cfg.solver.grid_points = static_cast<int>(opt_num(s, "grid_points", 65));
        if (s.contains("half_widths"))
            cfg.solver.half_widths = num_list(s["half_widths"], "solver.half_widths");
        if (s.contains("sizes"))
            for (const auto& v : s["sizes"]) cfg.solver.sizes.push_back(v.get<int>());
        if (s.contains("s_schedule"))
            cfg.solver.s_schedule = num_list(s["s_schedule"], "solver.s_schedule");
        cfg.solver.tol = opt_num(s, "tol", 1e-10);
        cfg.solver.max_rank = static_cast<int>(opt_num(s, "max_rank", 3));
        cfg.solver.clamp_mass = opt_num(s, "clamp_mass", 1e-6);
    }
    if (j.contains("gibbs")) {
        const json& g = j["gibbs"];
        cfg.gibbs.particles = static_cast<int>(opt_num(g, "particles", 4096));
        cfg.gibbs.iters = static_cast<int>(opt_num(g, "iters", 30));
        cfg.gibbs.candidates = static_cast<int>(opt_num(g, "candidates", 32));
        if (!g.contains("seed")) fail("gibbs.seed", "seed is mandatory for stochastic runs");
        cfg.gibbs.seed = g["seed"].get<std::uint64_t>();
        cfg.gibbs.max_depth = static_cast<int>(opt_num(g, "max_depth", 32));
        cfg.gibbs.w_subsample = static_cast<int>(opt_num(g, "w_subsample", 1024));
        cfg.gibbs.record_every = static_cast<int>(opt_num(g, "record_every", 5));
        cfg.gibbs.second_init = g.value("second_init", true);
    }
    if (j.contains("metric")) {
        const json& mt = j["metric"];
        cfg.metric.alpha = opt_num(mt, "alpha", 1.0);
        if (mt.contains("a") && mt["a"].is_number()) {
            cfg.metric.auto_a = false;
            cfg.metric.a = mt["a"].get<double>();
        } else if (mt.contains("a") && mt["a"] != "auto") {
            fail("metric.a", "number or \"auto\"");
        }
    }
    if (j.contains("contract")) {
        const json& ct = j["contract"];
        if (ct.contains("x")) cfg.contract.x = num_list(ct["x"], "contract.x");
        if (ct.contains("y")) cfg.contract.y = num_list(ct["y"], "contract.y");
        cfg.contract.n = static_cast<int>(opt_num(ct, "n", 2));
        cfg.contract.particles = static_cast<int>(opt_num(ct, "particles", 512));
        cfg.contract.local = ct.value("mode", "local") == "local";
        const std::string ch = ct.value("channel", "assignment_solver");
        if (ch == "coupled_draws")
            cfg.contract.channel = ContractionChannel::coupled_draws;
        else if (ch == "assignment_solver")
            cfg.contract.channel = ContractionChannel::assignment_solver;
        else
            fail("contract.channel", "one of assignment_solver|coupled_draws");
    }
    if (j.contains("tails")) {
        cfg.tails.epsilon = opt_num(j["tails"], "epsilon", 0.01);
        cfg.tails.horizon = static_cast<int>(opt_num(j["tails"], "horizon", 64));
    }
    if (j.contains("outputs")) cfg.output_dir = j["outputs"].value("dir", "out");
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

GridSpec resolve_grid(const ExperimentConfig& cfg)
{
    const int rank = solver_rank(cfg.potential, cfg.solver.max_rank);
    if (!cfg.solver.half_widths.empty()) {
        GridSpec spec;
        spec.half_widths = cfg.solver.half_widths;
        spec.sizes = cfg.solver.sizes;
        if (spec.sizes.empty())
            spec.sizes.assign(spec.half_widths.size(), cfg.solver.grid_points);
        if (spec.half_widths.size() != static_cast<std::size_t>(rank))
            throw ConfigInvalid("solver.half_widths: expected one entry per solver axis (rank " +
                                std::to_string(rank) + ")");
        return spec;
    }
    return auto_grid_spec(cfg.apriori, cfg.weights, rank, cfg.solver.grid_points,
                          cfg.solver.clamp_mass);
}

std::pair<double, double> resolve_metric_scale(const ExperimentConfig& cfg,
                                               const Potential& abar, int horizon)
{
    const double dsum = d_series(cfg.weights, cfg.metric.alpha, horizon);
    const double c_contr = contraction_constant(abar.lip_const(), dsum);
    if (!cfg.metric.auto_a) return {cfg.metric.a, c_contr};
    return {metric_scale_auto(c_contr), c_contr};
}

std::uint64_t config_hash(const nlohmann::json& j)
{
    const std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace shiftgibbs
