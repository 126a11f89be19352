#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "entrain/fourier.hpp"

namespace testutil {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline entrain::FourierSeries random_series(std::mt19937_64& rng, int order, double scale = 1.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    std::vector<double> a(order), b(order);
    for (int i = 0; i < order; ++i) {
        a[i] = d(rng);
        b[i] = d(rng);
    }
    return {d(rng), a, b};
}

// Direct evaluation of a0/2 + sum a_n cos + b_n sin, independent of the library.
inline double direct_eval(const entrain::FourierSeries& f, double t) {
    double s = 0.5 * f.a0();
    for (int n = 1; n <= f.order(); ++n) s += f.a(n) * std::cos(n * t) + f.b(n) * std::sin(n * t);
    return s;
}

// (1 / 2 pi) * integral over one period by the trapezoid rule.
inline double circle_mean(const std::function<double(double)>& g, int points) {
    double s = 0.0;
    for (int k = 0; k < points; ++k) s += g(kTwoPi * k / points);
    return s / points;
}

inline double max_abs_diff(const std::function<double(double)>& f, const std::function<double(double)>& g,
                           int points = 4096) {
    double m = 0.0;
    for (int k = 0; k < points; ++k) {
        const double t = kTwoPi * k / points;
        m = std::max(m, std::abs(f(t) - g(t)));
    }
    return m;
}

}  // namespace testutil
