#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "shiftgibbs/space.hpp"

namespace shiftgibbs {

// Rank-N function table on a product of symmetric uniform axes
// [-R_j, R_j], multilinear interpolation, clamp-to-boundary outside.
// Evaluation at a Point reads only its first N coordinates, with the
// implicit zero tail beyond the truncation.
class GridFunction {
public:
    GridFunction() : GridFunction({1.0}, {3}) {}  // trivial placeholder grid
    GridFunction(std::vector<double> half_widths, std::vector<int> sizes);

    static GridFunction constant(std::vector<double> half_widths, std::vector<int> sizes,
                                 double value);

    int rank() const { return static_cast<int>(sizes_.size()); }
    int size(int axis) const { return sizes_[static_cast<std::size_t>(axis)]; }
    double half_width(int axis) const { return half_widths_[static_cast<std::size_t>(axis)]; }
    double step(int axis) const { return steps_[static_cast<std::size_t>(axis)]; }
    double node_coord(int axis, int i) const
    {
        return -half_widths_[static_cast<std::size_t>(axis)] +
               steps_[static_cast<std::size_t>(axis)] * static_cast<double>(i);
    }

    std::size_t node_count() const { return static_cast<std::size_t>(values_.size()); }
    void node_coords(std::size_t flat, double* out) const;
    std::size_t zero_node() const;  // flat index of the origin (sizes are odd)

    double& value(std::size_t flat) { return values_[static_cast<Eigen::Index>(flat)]; }
    double value(std::size_t flat) const { return values_[static_cast<Eigen::Index>(flat)]; }
    Eigen::VectorXd& values() { return values_; }
    const Eigen::VectorXd& values() const { return values_; }

    bool same_axes(const GridFunction& o) const
    {
        return sizes_ == o.sizes_ && half_widths_ == o.half_widths_;
    }

    double evaluate(const double* coords, int ncoords) const;
    double evaluate(const Point& x) const;

    double max_abs_diff(const GridFunction& o) const;

private:
    std::vector<double> half_widths_;
    std::vector<int> sizes_;
    std::vector<double> steps_;
    std::vector<std::size_t> strides_;
    Eigen::VectorXd values_;
};

} // namespace shiftgibbs
