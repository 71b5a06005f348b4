#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ladder/error.hpp"
#include "ladder/pchip.hpp"

using namespace ladder;

namespace {

double trapezoid(const MonotoneCubic& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) sum += f(a + i * h);
    return sum * h;
}

}  // namespace

TEST_CASE("interpolates the nodes") {
    const std::vector<double> x{0, 1, 2.5, 4, 7}, y{1, 3, 3.5, 8, 9};
    const MonotoneCubic f(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(f(x[i]) == doctest::Approx(y[i]));
}

TEST_CASE("two nodes give a straight line") {
    const std::vector<double> x{1, 3}, y{2, 6};
    const MonotoneCubic f(x, y);
    CHECK(f(2.0) == doctest::Approx(4.0));
    CHECK(f(1.5) == doctest::Approx(3.0));
    CHECK(f.integral(1, 3) == doctest::Approx(8.0));
}

TEST_CASE("linear data stays linear") {
    const std::vector<double> x{0, 0.5, 2, 3, 6}, y{1, 2, 5, 7, 13};
    const MonotoneCubic f(x, y);
    for (double d : f.slopes()) CHECK(d == doctest::Approx(2.0));
    for (double t = 0; t <= 6; t += 0.37) CHECK(f(t) == doctest::Approx(2 * t + 1));
    CHECK(f.integral(0.25, 5.5) == doctest::Approx((5.5 * 5.5 + 5.5) - (0.0625 + 0.25)));
}

TEST_CASE("no overshoot and monotone on random monotone data") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> step(0.05, 3.0);
    std::uniform_real_distribution<double> rise(0.0, 5.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + trial % 9;
        std::vector<double> x{0}, y{0};
        for (int i = 1; i < n; ++i) {
            x.push_back(x.back() + step(rng));
            y.push_back(y.back() + (trial % 5 == 0 && i % 2 ? 0.0 : rise(rng)));
        }
        const MonotoneCubic f(x, y);
        for (std::size_t k = 0; k + 1 < x.size(); ++k) {
            double prev = f(x[k]);
            for (int j = 1; j <= 50; ++j) {
                const double v = f(x[k] + (x[k + 1] - x[k]) * j / 50.0);
                CHECK(v >= y[k] - 1e-9);
                CHECK(v <= y[k + 1] + 1e-9);
                CHECK(v >= prev - 1e-9);
                prev = v;
            }
        }
    }
}

TEST_CASE("exact integral agrees with dense quadrature") {
    const std::vector<double> x{0, 1, 1.5, 3, 4.2, 6}, y{0, 2, 2.2, 5, 5.1, 9};
    const MonotoneCubic f(x, y);
    CHECK(f.integral(0, 6) == doctest::Approx(trapezoid(f, 0, 6, 200000)).epsilon(1e-8));
    CHECK(f.integral(0.7, 4.9) == doctest::Approx(trapezoid(f, 0.7, 4.9, 200000)).epsilon(1e-8));
    CHECK(f.integral(2, 2) == 0.0);
    CHECK(f.integral(5, 1) == doctest::Approx(-f.integral(1, 5)));
}

TEST_CASE("evaluation clamps outside the nodes") {
    const std::vector<double> x{0, 1, 2}, y{0, 1, 4};
    const MonotoneCubic f(x, y);
    CHECK(f(-5) == 0.0);
    CHECK(f(10) == 4.0);
}

TEST_CASE("invalid nodes are rejected") {
    const std::vector<double> one{1}, x{0, 0, 1}, y{1, 2, 3};
    CHECK_THROWS_AS(MonotoneCubic(one, one), ValidationError);
    CHECK_THROWS_AS(MonotoneCubic(x, y), ValidationError);
}
