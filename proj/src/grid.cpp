#include "shiftgibbs/grid.hpp"

#include <algorithm>
#include <cmath>

#include "shiftgibbs/errors.hpp"

namespace shiftgibbs {

GridFunction::GridFunction(std::vector<double> half_widths, std::vector<int> sizes)
    : half_widths_(std::move(half_widths)), sizes_(std::move(sizes))
{
    if (sizes_.empty() || sizes_.size() != half_widths_.size())
        throw ConfigInvalid("grid: need matching nonempty axes");
    std::size_t total = 1;
    steps_.resize(sizes_.size());
    strides_.resize(sizes_.size());
    for (std::size_t j = 0; j < sizes_.size(); ++j) {
        if (sizes_[j] < 3 || sizes_[j] % 2 == 0)
            throw ConfigInvalid("grid: axis sizes must be odd and >= 3");
        if (!(half_widths_[j] > 0.0)) throw ConfigInvalid("grid: half widths must be positive");
        steps_[j] = 2.0 * half_widths_[j] / static_cast<double>(sizes_[j] - 1);
    }
    for (std::size_t j = sizes_.size(); j-- > 0;) {
        strides_[j] = total;
        total *= static_cast<std::size_t>(sizes_[j]);
    }
    values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
}

GridFunction GridFunction::constant(std::vector<double> half_widths, std::vector<int> sizes,
                                    double value)
{
    GridFunction g(std::move(half_widths), std::move(sizes));
    g.values_.setConstant(value);
    return g;
}

void GridFunction::node_coords(std::size_t flat, double* out) const
{
    for (std::size_t j = 0; j < sizes_.size(); ++j) {
        const std::size_t i = (flat / strides_[j]) % static_cast<std::size_t>(sizes_[j]);
        out[j] = node_coord(static_cast<int>(j), static_cast<int>(i));
    }
}

std::size_t GridFunction::zero_node() const
{
    std::size_t flat = 0;
    for (std::size_t j = 0; j < sizes_.size(); ++j)
        flat += strides_[j] * (static_cast<std::size_t>(sizes_[j]) / 2);
    return flat;
}

double GridFunction::evaluate(const double* coords, int ncoords) const
{
    const int r = rank();
    // Per-axis cell index and interpolation weight; coordinates beyond the
    // supplied count are implicit zeros (which land exactly on a node).
    int idx0[16];
    double frac[16];
    if (r > 16) throw Error("grid: rank above 16 not supported");
    for (int j = 0; j < r; ++j) {
        const double R = half_widths_[static_cast<std::size_t>(j)];
        double x = j < ncoords ? coords[j] : 0.0;
        x = std::clamp(x, -R, R);
        const double t = (x + R) / steps_[static_cast<std::size_t>(j)];
        int i0 = static_cast<int>(std::floor(t));
        i0 = std::clamp(i0, 0, sizes_[static_cast<std::size_t>(j)] - 2);
        idx0[j] = i0;
        frac[j] = std::clamp(t - static_cast<double>(i0), 0.0, 1.0);
    }
    double acc = 0.0;
    const unsigned corners = 1u << r;
    for (unsigned c = 0; c < corners; ++c) {
        double wgt = 1.0;
        std::size_t flat = 0;
        for (int j = 0; j < r; ++j) {
            const bool hi = (c >> j) & 1u;
            wgt *= hi ? frac[j] : 1.0 - frac[j];
            flat += strides_[static_cast<std::size_t>(j)] *
                    static_cast<std::size_t>(idx0[j] + (hi ? 1 : 0));
        }
        if (wgt != 0.0) acc += wgt * values_[static_cast<Eigen::Index>(flat)];
    }
    return acc;
}

double GridFunction::evaluate(const Point& x) const
{
    return evaluate(x.coords().data(), x.depth());
}

double GridFunction::max_abs_diff(const GridFunction& o) const
{
    if (!same_axes(o)) throw SizeMismatch("grid: incompatible axes");
    return (values_ - o.values_).cwiseAbs().maxCoeff();
}

} // namespace shiftgibbs
