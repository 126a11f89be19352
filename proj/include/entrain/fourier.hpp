#pragma once

#include <span>
#include <vector>

namespace entrain {

// Finite trigonometric series on the circle,
//     f(theta) = a0/2 + sum_n a_n cos(n theta) + b_n sin(n theta),  n = 1..order.
// Coefficients are stored 1-based in the sense that cos(0) index 0 holds a_1.
class FourierSeries {
public:
    FourierSeries() = default;
    FourierSeries(double a0, std::vector<double> a, std::vector<double> b);

    static FourierSeries constant(double value);
    static FourierSeries cosine(int harmonic, double amplitude = 1.0);
    static FourierSeries sine(int harmonic, double amplitude = 1.0);

    [[nodiscard]] int order() const noexcept { return static_cast<int>(a_.size()); }
    [[nodiscard]] double a0() const noexcept { return a0_; }
    // Cosine coefficient a_n; zero for n beyond the stored order.
    [[nodiscard]] double a(int n) const noexcept;
    [[nodiscard]] double b(int n) const noexcept;
    [[nodiscard]] std::span<const double> cos_coeffs() const noexcept { return a_; }
    [[nodiscard]] std::span<const double> sin_coeffs() const noexcept { return b_; }

    [[nodiscard]] double operator()(double theta) const noexcept;
    // Values on the uniform grid theta_k = 2 pi k / count.
    [[nodiscard]] std::vector<double> sample(int count) const;

    [[nodiscard]] FourierSeries derivative() const;
    // g(theta) = f(theta + delta).
    [[nodiscard]] FourierSeries shifted(double delta) const;
    [[nodiscard]] FourierSeries scaled(double factor) const;
    // Drops harmonics above `max_order` and trailing zero coefficients.
    [[nodiscard]] FourierSeries truncated(int max_order) const;
    // Highest harmonic with a nonzero coefficient (0 for constants).
    [[nodiscard]] int effective_order() const noexcept;

    // a0/2, the average over one period.
    [[nodiscard]] double mean() const noexcept { return 0.5 * a0_; }
    [[nodiscard]] bool is_zero(double tol = 0.0) const noexcept;
    // Largest period 2 pi / p such that only harmonics divisible by p are present.
    [[nodiscard]] int symmetry_order() const noexcept;

    friend FourierSeries operator+(const FourierSeries& f, const FourierSeries& g);
    friend FourierSeries operator-(const FourierSeries& f, const FourierSeries& g);
    friend FourierSeries operator*(double c, const FourierSeries& f) { return f.scaled(c); }

private:
    double a0_ = 0.0;
    std::vector<double> a_;
    std::vector<double> b_;
};

// Discrete Fourier projection of uniformly spaced samples over [0, 2 pi).
// Coefficients below 1e-12 of the largest sample magnitude are set to zero.
// Throws InsufficientResolution when samples.size() < 2*order + 1.
FourierSeries fit(std::span<const double> samples, int order);

// <f g>, the circle average of the product.
double inner(const FourierSeries& f, const FourierSeries& g);
double energy(const FourierSeries& f);
double rms(const FourierSeries& f);

// Location and value of an extremum over one period.
struct Extremum {
    double phase = 0.0;
    double value = 0.0;
};

// Global maximum / minimum by a dense grid scan (4096 points over the
// fundamental period) refined with golden-section search to 1e-10 in phase.
// Among equivalent extrema the one with the smallest phase in
// [0, 2 pi / symmetry_order) is reported.
Extremum locate_max(const FourierSeries& f, int grid = 4096);
Extremum locate_min(const FourierSeries& f, int grid = 4096);

// Evaluator with cached coefficients for tight simulation loops.
class SeriesEvaluator {
public:
    explicit SeriesEvaluator(const FourierSeries& f);
    [[nodiscard]] double operator()(double theta) const noexcept;

private:
    double half_a0_;
    std::vector<double> a_;
    std::vector<double> b_;
};

// Wraps a phase into [0, period).
double wrap_phase(double phase, double period);

}  // namespace entrain
