#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

#include "shiftgibbs/space.hpp"

namespace shiftgibbs {

// Equal-weight particle cloud on X. All particles share one space kind and
// one truncation depth (matrix row = particle coordinates).
class EmpiricalMeasure {
public:
    EmpiricalMeasure(Eigen::MatrixXd particles, SpaceKind space, int generation = 0,
                     std::uint64_t seed_lineage = 0);

    static EmpiricalMeasure dirac(const Point& x, int count);
    // iid cloud: `draw` returns one particle row from its own RNG stream.
    static EmpiricalMeasure sampled(int count, int depth, SpaceKind space, std::uint64_t seed,
                                    const std::function<Eigen::RowVectorXd(std::uint64_t)>& draw);

    int count() const { return static_cast<int>(particles_.rows()); }
    int depth() const { return static_cast<int>(particles_.cols()); }
    SpaceKind space() const { return space_; }
    int generation() const { return generation_; }
    std::uint64_t seed_lineage() const { return seed_lineage_; }

    const Eigen::MatrixXd& particles() const { return particles_; }
    Eigen::MatrixXd& particles() { return particles_; }
    Point particle(int i) const;

    EmpiricalMeasure subsample(int n, std::uint64_t seed) const;

    // Statistics over particles.
    double coord_mean(int axis) const;
    double coord_std(int axis) const;
    double mean_of(const std::function<double(const Point&)>& f) const;

    void bump_generation() { ++generation_; }

private:
    Eigen::MatrixXd particles_;
    SpaceKind space_;
    int generation_;
    std::uint64_t seed_lineage_;
};

// Pushforward by the shift: every particle mapped through L.
EmpiricalMeasure pushforward_L(const WeightSequence& w, const EmpiricalMeasure& mu);

} // namespace shiftgibbs
