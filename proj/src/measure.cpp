#include "shiftgibbs/measure.hpp"

#include <cmath>

#include "shiftgibbs/errors.hpp"
#include "shiftgibbs/rng.hpp"

namespace shiftgibbs {

EmpiricalMeasure::EmpiricalMeasure(Eigen::MatrixXd particles, SpaceKind space, int generation,
                                   std::uint64_t seed_lineage)
    : particles_(std::move(particles)),
      space_(space),
      generation_(generation),
      seed_lineage_(seed_lineage)
{
    if (particles_.rows() < 1) throw Error("measure: empty particle cloud");
}

EmpiricalMeasure EmpiricalMeasure::dirac(const Point& x, int count)
{
    if (count < 1) throw Error("measure: count must be >= 1");
    Eigen::MatrixXd p(count, std::max(1, x.depth()));
    p.setZero();
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < x.depth(); ++j) p(i, j) = x.coord(j);
    return EmpiricalMeasure(std::move(p), x.space());
}

EmpiricalMeasure EmpiricalMeasure::sampled(
    int count, int depth, SpaceKind space, std::uint64_t seed,
    const std::function<Eigen::RowVectorXd(std::uint64_t)>& draw)
{
    if (count < 1 || depth < 1) throw Error("measure: bad cloud shape");
    Eigen::MatrixXd p(count, depth);
    for (int i = 0; i < count; ++i) {
        const Eigen::RowVectorXd row = draw(static_cast<std::uint64_t>(i));
        if (row.size() != depth) throw SizeMismatch("measure: sampler row width mismatch");
        p.row(i) = row;
    }
    return EmpiricalMeasure(std::move(p), space, 0, seed);
}

Point EmpiricalMeasure::particle(int i) const
{
    return Point(particles_.row(i).transpose(), space_);
}

EmpiricalMeasure EmpiricalMeasure::subsample(int n, std::uint64_t seed) const
{
    if (n >= count()) return *this;
    // Fisher-Yates prefix over a deterministic stream.
    std::vector<int> idx(static_cast<std::size_t>(count()));
    for (int i = 0; i < count(); ++i) idx[static_cast<std::size_t>(i)] = i;
    SplitMix64 rng = substream(seed, 0x5ab5, 0);
    for (int i = 0; i < n; ++i) {
        const int j = i + static_cast<int>(rng.next() % static_cast<std::uint64_t>(count() - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    Eigen::MatrixXd p(n, depth());
    for (int i = 0; i < n; ++i) p.row(i) = particles_.row(idx[static_cast<std::size_t>(i)]);
    return EmpiricalMeasure(std::move(p), space_, generation_, seed_lineage_);
}

double EmpiricalMeasure::coord_mean(int axis) const
{
    if (axis >= depth()) return 0.0;
    return particles_.col(axis).mean();
}

double EmpiricalMeasure::coord_std(int axis) const
{
    if (axis >= depth()) return 0.0;
    const double mu = coord_mean(axis);
    const double n = static_cast<double>(count());
    return std::sqrt((particles_.col(axis).array() - mu).square().sum() / (n - 1.0));
}

double EmpiricalMeasure::mean_of(const std::function<double(const Point&)>& f) const
{
    double s = 0.0;
    for (int i = 0; i < count(); ++i) s += f(particle(i));
    return s / static_cast<double>(count());
}

EmpiricalMeasure pushforward_L(const WeightSequence& w, const EmpiricalMeasure& mu)
{
    const int d = std::max(1, mu.depth() - 1);
    Eigen::MatrixXd p(mu.count(), d);
    p.setZero();
    for (int i = 0; i < mu.count(); ++i)
        for (int j = 0; j + 1 < mu.depth(); ++j)
            p(i, j) = w.value(j + 1) * mu.particles()(i, j + 1);
    return EmpiricalMeasure(std::move(p), mu.space(), mu.generation(), mu.seed_lineage());
}

} // namespace shiftgibbs
