#pragma once

#include <Eigen/Core>
#include <string>

#include "shiftgibbs/weights.hpp"

namespace shiftgibbs {

struct SpaceKind {
    enum class Tag { c0, lp };
    Tag tag = Tag::lp;
    double p = 1.0;

    static SpaceKind c0() { return {Tag::c0, 0.0}; }
    static SpaceKind lp(double p);

    bool is_c0() const { return tag == Tag::c0; }
    bool operator==(const SpaceKind& o) const;
    std::string describe() const;
};

// A finitely truncated point of c0 / l^p: an explicit coordinate head and an
// implicit all-zero tail. Trailing zeros are trimmed so that equality of
// points is equality of coordinate vectors.
class Point {
public:
    Point(Eigen::VectorXd coords, SpaceKind space);

    static Point zero(SpaceKind space);
    static Point basis(int k, SpaceKind space);  // e_k, k >= 1

    int depth() const { return static_cast<int>(coords_.size()); }
    double coord(int i) const  // 0-based; zero beyond the truncation
    {
        return i < depth() ? coords_[i] : 0.0;
    }
    const Eigen::VectorXd& coords() const { return coords_; }
    SpaceKind space() const { return space_; }

    bool operator==(const Point& o) const;

private:
    Eigen::VectorXd coords_;
    SpaceKind space_;
};

struct MetricSpec {
    enum class Kind { norm, holder, bounded, shift };
    Kind kind = Kind::norm;
    double alpha = 1.0;  // Hoelder exponent in (0, 1]
    double a = 1.0;      // scale of the bounded metric min{1, a * D^alpha}

    static MetricSpec norm_metric() { return {Kind::norm, 1.0, 1.0}; }
    static MetricSpec holder(double alpha);
    static MetricSpec bounded(double a, double alpha);
    static MetricSpec shift_metric() { return {Kind::shift, 1.0, 1.0}; }
};

double norm(const Point& x);

// Norm of the coordinate-wise difference; points may have different depths.
double norm_diff(const Point& x, const Point& y);

double dist(const Point& x, const Point& y, const MetricSpec& spec);

// L((x_n)) = (alpha_n x_{n+1}); drops the first coordinate.
Point apply_L(const WeightSequence& w, const Point& x);

// The section of L through the a-priori coordinate: (r, x_1/alpha_1, ...).
Point preimage(const WeightSequence& w, const Point& x, double r);

} // namespace shiftgibbs
