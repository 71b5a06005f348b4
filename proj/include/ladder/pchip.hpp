#pragma once

#include <span>
#include <vector>

namespace ladder {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Butland
/// interior slopes, three-point one-sided end slopes). Two nodes give the
/// straight line. Values never leave [min y, max y] between nodes.
class MonotoneCubic {
public:
    /// x must be strictly increasing with at least two nodes.
    MonotoneCubic(std::span<const double> x, std::span<const double> y);

    /// Evaluates the interpolant; arguments outside the node range are clamped.
    double operator()(double t) const;

    /// Exact integral over [a, b], both inside the node range.
    double integral(double a, double b) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    const std::vector<double>& slopes() const { return d_; }

private:
    std::size_t segment(double t) const;
    double antiderivative(double t) const;  // from x_min

    std::vector<double> x_, y_, d_;
    std::vector<double> cumulative_;  // integral from x_min to each node
};

}  // namespace ladder
