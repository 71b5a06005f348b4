#include "ladder/pchip.hpp"

#include <algorithm>
#include <cmath>

#include "ladder/error.hpp"

namespace ladder {
namespace {

double end_slope(double h0, double h1, double s0, double s1) {
    double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (std::signbit(d) != std::signbit(s0) || s0 == 0.0) {
        d = 0.0;
    } else if (std::signbit(s0) != std::signbit(s1) && std::abs(d) > 3.0 * std::abs(s0)) {
        d = 3.0 * s0;
    }
    return d;
}

// Integrals of the Hermite basis over [0, s] of the unit interval.
double int_h00(double s) { return s * s * s * s / 2.0 - s * s * s + s; }
double int_h10(double s) { return s * s * s * s / 4.0 - 2.0 * s * s * s / 3.0 + s * s / 2.0; }
double int_h01(double s) { return -s * s * s * s / 2.0 + s * s * s; }
double int_h11(double s) { return s * s * s * s / 4.0 - s * s * s / 3.0; }

}  // namespace

MonotoneCubic::MonotoneCubic(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw ValidationError("interpolation needs at least two nodes");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) throw ValidationError("interpolation nodes must strictly increase");
    }

    std::vector<double> h(n - 1), s(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        s[i] = (y_[i + 1] - y_[i]) / h[i];
    }

    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = s[0];
    } else {
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (s[k - 1] * s[k] <= 0.0) continue;
            const double w1 = 2.0 * h[k] + h[k - 1];
            const double w2 = h[k] + 2.0 * h[k - 1];
            d_[k] = (w1 + w2) / (w1 / s[k - 1] + w2 / s[k]);
        }
        d_[0] = end_slope(h[0], h[1], s[0], s[1]);
        d_[n - 1] = end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
    }

    cumulative_.assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        cumulative_[k + 1] = cumulative_[k] +
                             h[k] * (int_h00(1.0) * y_[k] + int_h10(1.0) * h[k] * d_[k] +
                                     int_h01(1.0) * y_[k + 1] + int_h11(1.0) * h[k] * d_[k + 1]);
    }
}

std::size_t MonotoneCubic::segment(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(k, x_.size() - 2);
}

double MonotoneCubic::operator()(double t) const {
    t = std::clamp(t, x_.front(), x_.back());
    const std::size_t k = segment(t);
    const double h = x_[k + 1] - x_[k];
    const double u = (t - x_[k]) / h;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y_[k] + (u3 - 2 * u2 + u) * h * d_[k] +
           (-2 * u3 + 3 * u2) * y_[k + 1] + (u3 - u2) * h * d_[k + 1];
}

double MonotoneCubic::antiderivative(double t) const {
    t = std::clamp(t, x_.front(), x_.back());
    const std::size_t k = segment(t);
    const double h = x_[k + 1] - x_[k];
    const double u = (t - x_[k]) / h;
    return cumulative_[k] + h * (int_h00(u) * y_[k] + int_h10(u) * h * d_[k] +
                                 int_h01(u) * y_[k + 1] + int_h11(u) * h * d_[k + 1]);
}

double MonotoneCubic::integral(double a, double b) const {
    return antiderivative(b) - antiderivative(a);
}

}  // namespace ladder
