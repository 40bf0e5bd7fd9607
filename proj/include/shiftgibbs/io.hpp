#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "shiftgibbs/grid.hpp"
#include "shiftgibbs/measure.hpp"

namespace shiftgibbs {

inline constexpr const char* kVersion = "0.1.0";

// Writes are atomic: temp file in the target directory, then rename.
void atomic_write_text(const std::string& path, const std::string& content);
void write_json_report(const std::string& path, const nlohmann::json& j);

// Report envelope carried by every CLI artifact.
nlohmann::json report_envelope(const nlohmann::json& config, std::uint64_t seed, int threads,
                               bool reproducible);

// Particle cloud as JSONL, one JSON array of coordinates per line.
void write_particles_jsonl(const std::string& path, const EmpiricalMeasure& mu);
EmpiricalMeasure read_particles_jsonl(const std::string& path, SpaceKind space);

// Grid dump: little-endian float64 payload with an axes header, plus a JSON
// metadata sidecar written by the caller.
void write_grid_binary(const std::string& path, const GridFunction& g);
GridFunction read_grid_binary(const std::string& path);
nlohmann::json grid_metadata(const GridFunction& g, const std::string& bin_path);

} // namespace shiftgibbs
