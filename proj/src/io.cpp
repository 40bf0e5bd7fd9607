#include "shiftgibbs/io.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "shiftgibbs/config.hpp"
#include "shiftgibbs/errors.hpp"

namespace shiftgibbs {

namespace fs = std::filesystem;
using nlohmann::json;

void atomic_write_text(const std::string& path, const std::string& content)
{
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("io: cannot open " + tmp.string());
        out << content;
        if (!out) throw Error("io: short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_json_report(const std::string& path, const json& j)
{
    atomic_write_text(path, j.dump(2) + "\n");
}

json report_envelope(const json& config, std::uint64_t seed, int threads, bool reproducible)
{
    json env;
    env["tool"] = "shiftgibbs";
    env["version"] = kVersion;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    env["config_hash"] = hash;
    env["seed"] = seed;
    env["threads"] = threads;
    if (!reproducible) {
        const auto now = std::chrono::system_clock::now();
        env["timestamp_unix"] =
            std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    }
    return env;
}

void write_particles_jsonl(const std::string& path, const EmpiricalMeasure& mu)
{
    std::ostringstream os;
    for (int i = 0; i < mu.count(); ++i) {
        json row = json::array();
        for (int j = 0; j < mu.depth(); ++j) row.push_back(mu.particles()(i, j));
        os << row.dump() << "\n";
    }
    atomic_write_text(path, os.str());
}

EmpiricalMeasure read_particles_jsonl(const std::string& path, SpaceKind space)
{
    std::ifstream in(path);
    if (!in) throw Error("io: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json row = json::parse(line);
        rows.emplace_back();
        for (const auto& v : row) rows.back().push_back(v.get<double>());
        width = std::max(width, rows.back().size());
    }
    if (rows.empty()) throw Error("io: empty particle file " + path);
    Eigen::MatrixXd p(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    p.setZero();
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return EmpiricalMeasure(std::move(p), space);
}

void write_grid_binary(const std::string& path, const GridFunction& g)
{
    std::ostringstream os;
    os.write("SGGRID01", 8);
    const std::uint32_t rank = static_cast<std::uint32_t>(g.rank());
    os.write(reinterpret_cast<const char*>(&rank), 4);
    for (int j = 0; j < g.rank(); ++j) {
        const std::uint32_t sz = static_cast<std::uint32_t>(g.size(j));
        const double hw = g.half_width(j);
        os.write(reinterpret_cast<const char*>(&sz), 4);
        os.write(reinterpret_cast<const char*>(&hw), 8);
    }
    os.write(reinterpret_cast<const char*>(g.values().data()),
             static_cast<std::streamsize>(g.node_count() * sizeof(double)));
    atomic_write_text(path, os.str());
}

GridFunction read_grid_binary(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::string(magic, 8) != "SGGRID01") throw Error("io: bad grid magic in " + path);
    std::uint32_t rank = 0;
    in.read(reinterpret_cast<char*>(&rank), 4);
    std::vector<int> sizes(rank);
    std::vector<double> hws(rank);
    for (std::uint32_t j = 0; j < rank; ++j) {
        std::uint32_t sz = 0;
        in.read(reinterpret_cast<char*>(&sz), 4);
        in.read(reinterpret_cast<char*>(&hws[j]), 8);
        sizes[j] = static_cast<int>(sz);
    }
    GridFunction g(hws, sizes);
    in.read(reinterpret_cast<char*>(g.values().data()),
            static_cast<std::streamsize>(g.node_count() * sizeof(double)));
    if (!in) throw Error("io: truncated grid file " + path);
    return g;
}

json grid_metadata(const GridFunction& g, const std::string& bin_path)
{
    json meta;
    meta["format"] = "SGGRID01";
    meta["payload"] = bin_path;
    meta["rank"] = g.rank();
    json axes = json::array();
    for (int j = 0; j < g.rank(); ++j)
        axes.push_back({{"half_width", g.half_width(j)}, {"size", g.size(j)}});
    meta["axes"] = axes;
    meta["dtype"] = "float64-le";
    return meta;
}

} // namespace shiftgibbs
