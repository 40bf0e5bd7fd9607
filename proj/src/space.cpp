#include "shiftgibbs/space.hpp"

#include <algorithm>
#include <cmath>

#include "shiftgibbs/errors.hpp"

namespace shiftgibbs {

SpaceKind SpaceKind::lp(double p)
{
    if (!(p >= 1.0)) throw ConfigInvalid("space: lp requires p >= 1");
    return {Tag::lp, p};
}

bool SpaceKind::operator==(const SpaceKind& o) const
{
    if (tag != o.tag) return false;
    return tag == Tag::c0 || p == o.p;
}

std::string SpaceKind::describe() const
{
    if (is_c0()) return "c0";
    return "l^" + std::to_string(p);
}

namespace {

Eigen::VectorXd trim(Eigen::VectorXd v)
{
    Eigen::Index n = v.size();
    while (n > 0 && v[n - 1] == 0.0) --n;
    v.conservativeResize(n);
    return v;
}

} // namespace

Point::Point(Eigen::VectorXd coords, SpaceKind space)
    : coords_(trim(std::move(coords))), space_(space)
{
}

Point Point::zero(SpaceKind space) { return Point(Eigen::VectorXd(), space); }

Point Point::basis(int k, SpaceKind space)
{
    if (k < 1) throw Error("Point::basis: k must be >= 1");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(k);
    v[k - 1] = 1.0;
    return Point(std::move(v), space);
}

bool Point::operator==(const Point& o) const
{
    return space_ == o.space_ && coords_.size() == o.coords_.size() && coords_ == o.coords_;
}

double norm(const Point& x)
{
    if (x.depth() == 0) return 0.0;
    if (x.space().is_c0()) return x.coords().cwiseAbs().maxCoeff();
    const double p = x.space().p;
    if (p == 1.0) return x.coords().cwiseAbs().sum();
    if (p == 2.0) return x.coords().norm();
    return std::pow(x.coords().cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

double norm_diff(const Point& x, const Point& y)
{
    if (!(x.space() == y.space())) throw SpaceMismatch("norm_diff: points in different spaces");
    const int n = std::max(x.depth(), y.depth());
    if (n == 0) return 0.0;
    if (x.space().is_c0()) {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(x.coord(i) - y.coord(i)));
        return m;
    }
    const double p = x.space().p;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::pow(std::fabs(x.coord(i) - y.coord(i)), p);
    return std::pow(s, 1.0 / p);
}

namespace {

// D_shift, truncated at the points' depth; exact because the implicit tails
// are zero. 2^{-n} starts at n = 1 for the first coordinate.
double shift_dist(const Point& x, const Point& y)
{
    const int n = std::max(x.depth(), y.depth());
    if (x.space().is_c0()) {
        double m = 0.0;
        double w = 0.5;
        for (int i = 0; i < n; ++i, w *= 0.5)
            m = std::max(m, std::min(1.0, std::fabs(x.coord(i) - y.coord(i))) * w);
        return m;
    }
    const double p = x.space().p;
    double s = 0.0;
    double w = 0.5;
    for (int i = 0; i < n; ++i, w *= 0.5)
        s += std::min(1.0, std::pow(std::fabs(x.coord(i) - y.coord(i)), p)) * w;
    return std::pow(s, 1.0 / p);
}

} // namespace

MetricSpec MetricSpec::holder(double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigInvalid("metric: alpha must be in (0,1]");
    return {Kind::holder, alpha, 1.0};
}

MetricSpec MetricSpec::bounded(double a, double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigInvalid("metric: alpha must be in (0,1]");
    if (!(a > 0.0)) throw ConfigInvalid("metric: a must be positive");
    return {Kind::bounded, alpha, a};
}

double dist(const Point& x, const Point& y, const MetricSpec& spec)
{
    if (!(x.space() == y.space())) throw SpaceMismatch("dist: points in different spaces");
    switch (spec.kind) {
        case MetricSpec::Kind::norm: return norm_diff(x, y);
        case MetricSpec::Kind::holder: return std::pow(norm_diff(x, y), spec.alpha);
        case MetricSpec::Kind::bounded:
            return std::min(1.0, spec.a * std::pow(norm_diff(x, y), spec.alpha));
        default: return shift_dist(x, y);
    }
}

Point apply_L(const WeightSequence& w, const Point& x)
{
    const int n = x.depth();
    if (n <= 1) return Point::zero(x.space());
    Eigen::VectorXd v(n - 1);
    for (int i = 0; i + 1 < n; ++i) v[i] = w.value(i + 1) * x.coord(i + 1);
    return Point(std::move(v), x.space());
}

Point preimage(const WeightSequence& w, const Point& x, double r)
{
    const int n = x.depth();
    Eigen::VectorXd v(n + 1);
    v[0] = r;
    for (int i = 0; i < n; ++i) v[i + 1] = x.coord(i) / w.value(i + 1);
    return Point(std::move(v), x.space());
}

} // namespace shiftgibbs
