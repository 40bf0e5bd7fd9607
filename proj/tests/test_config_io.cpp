#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "shiftgibbs/config.hpp"
#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/io.hpp"

using namespace shiftgibbs;
using nlohmann::json;

namespace {

json base_config()
{
    return json::parse(R"({
      "space": {"kind": "lp", "p": 1},
      "weights": {"kind": "constant", "alpha": 2.0},
      "apriori": {"kind": "gaussian", "mean": 0, "variance": 1, "quadrature_order": 40},
      "potential": {"kind": "builtin", "name": "zero"},
      "solver": {"grid_points": 33, "s_schedule": [0.9, 0.99], "tol": 1e-9},
      "gibbs": {"particles": 128, "iters": 4, "candidates": 8, "seed": 7},
      "metric": {"a": "auto", "alpha": 1.0},
      "outputs": {"dir": "out"}
    })");
}

} // namespace

TEST_CASE("config parses into typed pieces")
{
    const ExperimentConfig cfg = parse_config(base_config());
    CHECK(cfg.space.p == 1.0);
    CHECK(cfg.weights.kind() == WeightSequence::Kind::constant);
    CHECK(cfg.weights.value(3) == doctest::Approx(2.0));
    CHECK(cfg.apriori.kind() == AprioriMeasure::Kind::gaussian);
    CHECK(cfg.potential.name() == "zero");
    CHECK(cfg.solver.s_schedule.size() == 2);
    CHECK(cfg.gibbs.seed == 7);
    CHECK(cfg.metric.auto_a);
}

TEST_CASE("config diagnostics carry field paths")
{
    json j = base_config();
    j["weights"]["kind"] = "nope";
    try {
        parse_config(j);
        FAIL("expected ConfigInvalid");
    } catch (const ConfigInvalid& e) {
        CHECK(std::string(e.what()).find("weights.kind") != std::string::npos);
    }

    json j2 = base_config();
    j2["gibbs"].erase("seed");
    try {
        parse_config(j2);
        FAIL("expected ConfigInvalid");
    } catch (const ConfigInvalid& e) {
        CHECK(std::string(e.what()).find("gibbs.seed") != std::string::npos);
    }

    json j3 = base_config();
    j3["apriori"] = {{"kind", "student_t"}};
    CHECK_THROWS_AS(parse_config(j3), ConfigInvalid);  // gamma missing
}

TEST_CASE("auto grid tracks the preimage ranges")
{
    const ExperimentConfig cfg = parse_config(base_config());
    const GridSpec spec = resolve_grid(cfg);
    REQUIRE(spec.half_widths.size() == 1);  // zero potential: rank-1 solver grid
    // R covers all but 1e-6 of the gaussian tail
    CHECK(cfg.apriori.tail(spec.half_widths[0]) <= 1e-6);

    json j = base_config();
    j["potential"] = {{"kind", "builtin"},
                      {"name", "tanh_coords"},
                      {"params", {{"coeffs", {0.3, 0.2, 0.1}}}}};
    const ExperimentConfig cfg3 = parse_config(j);
    const GridSpec spec3 = resolve_grid(cfg3);
    REQUIRE(spec3.half_widths.size() == 2);  // rank 3 potential -> rank 2 grid
    CHECK(spec3.half_widths[1] == doctest::Approx(spec3.half_widths[0] / 2.0));
}

TEST_CASE("metric scale resolution")
{
    const ExperimentConfig cfg = parse_config(base_config());
    // zero potential: c_contr = 0 and the rule floors at a = 1
    const auto [a, c] = resolve_metric_scale(cfg, cfg.potential);
    CHECK(a == 1.0);
    CHECK(c == 0.0);

    json j = base_config();
    j["metric"]["a"] = 2.5;
    const ExperimentConfig cfg2 = parse_config(j);
    CHECK_FALSE(cfg2.metric.auto_a);
    CHECK(resolve_metric_scale(cfg2, cfg2.potential).first == 2.5);
}

TEST_CASE("config hash is stable and content sensitive")
{
    const json a = base_config();
    json b = base_config();
    CHECK(config_hash(a) == config_hash(b));
    b["gibbs"]["seed"] = 8;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("particle jsonl round trip")
{
    const auto dir = std::filesystem::temp_directory_path() / "sg_io_test";
    std::filesystem::create_directories(dir);
    Eigen::MatrixXd p(3, 2);
    p << 1.0, 2.0, -0.5, 0.0, 1e-9, 3.25;
    const EmpiricalMeasure mu(p, SpaceKind::lp(1.0));
    const std::string path = (dir / "cloud.jsonl").string();
    write_particles_jsonl(path, mu);
    const EmpiricalMeasure back = read_particles_jsonl(path, SpaceKind::lp(1.0));
    CHECK(back.count() == 3);
    CHECK(back.particles() == p);
    std::filesystem::remove_all(dir);
}

TEST_CASE("grid binary round trip with metadata")
{
    const auto dir = std::filesystem::temp_directory_path() / "sg_grid_test";
    std::filesystem::create_directories(dir);
    GridFunction g({2.0, 1.0}, {5, 3});
    for (std::size_t i = 0; i < g.node_count(); ++i)
        g.value(i) = 0.1 * static_cast<double>(i) - 0.4;
    const std::string path = (dir / "u.bin").string();
    write_grid_binary(path, g);
    const GridFunction back = read_grid_binary(path);
    CHECK(back.same_axes(g));
    CHECK(back.max_abs_diff(g) == 0.0);

    const json meta = grid_metadata(g, "u.bin");
    CHECK(meta["rank"] == 2);
    CHECK(meta["axes"][0]["size"] == 5);
    CHECK(meta["dtype"] == "float64-le");
    std::filesystem::remove_all(dir);
}

TEST_CASE("atomic writes leave no temp files and reports parse back")
{
    const auto dir = std::filesystem::temp_directory_path() / "sg_report_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "r.json").string();
    json env = report_envelope(base_config(), 7, 4, true);
    env["report"] = {{"value", 1.25}};
    write_json_report(path, env);

    std::ifstream in(path);
    json back;
    in >> back;
    CHECK(back["tool"] == "shiftgibbs");
    CHECK(back["version"] == kVersion);
    CHECK(back["seed"] == 7);
    CHECK_FALSE(back.contains("timestamp_unix"));  // reproducible mode
    CHECK(back["report"]["value"] == 1.25);
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        CHECK(entry.path().extension() != ".tmp");
    std::filesystem::remove_all(dir);
}

TEST_CASE("grid function evaluation: nodes exact, multilinear between, clamped outside")
{
    GridFunction g({1.0}, {5});  // nodes at -1, -0.5, 0, 0.5, 1
    for (int i = 0; i < 5; ++i) g.value(static_cast<std::size_t>(i)) = i * i * 0.25;
    const double at_node = g.node_coord(0, 3);
    CHECK(g.evaluate(&at_node, 1) == doctest::Approx(2.25));
    // halfway between nodes 2 and 3: (1.0 + 2.25)/2
    const double mid = 0.25;
    CHECK(g.evaluate(&mid, 1) == doctest::Approx(1.625));
    // clamp to the right boundary value
    const double outside = 7.0;
    CHECK(g.evaluate(&outside, 1) == doctest::Approx(4.0));
    CHECK(g.zero_node() == 2);
}
