#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftgibbs/apriori.hpp"
#include "shiftgibbs/contraction.hpp"
#include "shiftgibbs/potential.hpp"
#include "shiftgibbs/space.hpp"
#include "shiftgibbs/transfer.hpp"
#include "shiftgibbs/weights.hpp"

namespace shiftgibbs {

struct SolverConfig {
    int grid_points = 65;
    std::vector<double> half_widths;  // empty => auto from the a-priori tail
    std::vector<int> sizes;           // empty => grid_points on every axis
    std::vector<double> s_schedule = {0.9, 0.99, 0.999, 0.9999};
    double tol = 1e-10;
    int max_rank = 3;
    double clamp_mass = 1e-6;
};

struct GibbsConfig {
    int particles = 4096;
    int iters = 30;
    int candidates = 32;
    std::uint64_t seed = 1;
    int max_depth = 32;
    int w_subsample = 1024;
    int record_every = 5;
    bool second_init = true;
};

struct MetricConfig {
    bool auto_a = true;
    double a = 1.0;
    double alpha = 1.0;
};

struct ContractConfig {
    std::vector<double> x;
    std::vector<double> y = {0.25};
    int n = 2;
    int particles = 512;
    bool local = true;
    ContractionChannel channel = ContractionChannel::assignment_solver;
};

struct TailsConfig {
    double epsilon = 0.01;
    int horizon = 64;
};

// Parsed experiment: every subcommand reads the parts it needs. The raw
// canonical JSON is retained for the report hash.
struct ExperimentConfig {
    SpaceKind space = SpaceKind::lp(1.0);
    WeightSequence weights = WeightSequence::constant(2.0);
    AprioriMeasure apriori = AprioriMeasure::gaussian(0.0, 1.0);
    Potential potential = Potential::zero();
    SolverConfig solver;
    GibbsConfig gibbs;
    MetricConfig metric;
    ContractConfig contract;
    TailsConfig tails;
    std::string output_dir = "out";
    nlohmann::json raw;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// Resolved grid spec for the configured potential (explicit axes or auto).
GridSpec resolve_grid(const ExperimentConfig& cfg);

// Resolved bounded-metric scale: explicit value, or max{8 c_contr/3, 1}
// computed from the potential's declared constants. Returns (a, c_contr).
std::pair<double, double> resolve_metric_scale(const ExperimentConfig& cfg,
                                               const Potential& abar, int horizon = 64);

std::uint64_t config_hash(const nlohmann::json& j);

} // namespace shiftgibbs
