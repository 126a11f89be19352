#include "entrain/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "entrain/error.hpp"

namespace entrain {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFitTruncation = 1e-12;
constexpr double kPhaseTolerance = 1e-10;

template <typename Fn>
double golden_section_max(Fn&& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

Extremum locate(const FourierSeries& f, int grid, double sign) {
    const int p = f.symmetry_order();
    if (p == 0) return {0.0, f(0.0)};
    const double period = kTwoPi / p;
    const double h = period / grid;

    int best = 0;
    double best_val = sign * f(0.0);
    for (int i = 1; i < grid; ++i) {
        const double val = sign * f(h * i);
        if (val > best_val) {
            best_val = val;
            best = i;
        }
    }
    auto objective = [&](double x) { return sign * f(x); };
    double phase = golden_section_max(objective, h * (best - 1), h * (best + 1), kPhaseTolerance);

    // Newton polish on f' = 0; golden section alone resolves the phase only to
    // about sqrt(machine eps) because the objective is flat at the extremum.
    const FourierSeries d1 = f.derivative();
    const FourierSeries d2 = d1.derivative();
    for (int it = 0; it < 4; ++it) {
        const double curv = d2(phase);
        if (sign * curv >= 0.0) break;
        const double step = -d1(phase) / curv;
        if (!std::isfinite(step) || std::abs(step) > h) break;
        phase += step;
        if (std::abs(step) < 1e-15) break;
    }

    phase = wrap_phase(phase, period);
    if (period - phase < 1e-9) phase = 0.0;
    return {phase, f(phase)};
}
}  // namespace

double wrap_phase(double phase, double period) {
    double r = std::fmod(phase, period);
    if (r < 0.0) r += period;
    if (r >= period) r = 0.0;
    return r;
}

FourierSeries::FourierSeries(double a0, std::vector<double> a, std::vector<double> b)
    : a0_(a0), a_(std::move(a)), b_(std::move(b)) {
    if (a_.size() != b_.size()) {
        throw Error(ErrorKind::InvalidArgument, "cosine and sine coefficient lists differ in length");
    }
    auto finite = [](double x) { return std::isfinite(x); };
    if (!std::isfinite(a0_) || !std::all_of(a_.begin(), a_.end(), finite) ||
        !std::all_of(b_.begin(), b_.end(), finite)) {
        throw Error(ErrorKind::InvalidArgument, "Fourier coefficients must be finite");
    }
}

FourierSeries FourierSeries::constant(double value) { return FourierSeries(2.0 * value, {}, {}); }

FourierSeries FourierSeries::cosine(int harmonic, double amplitude) {
    if (harmonic == 0) return constant(amplitude);
    std::vector<double> a(harmonic, 0.0), b(harmonic, 0.0);
    a[harmonic - 1] = amplitude;
    return FourierSeries(0.0, std::move(a), std::move(b));
}

FourierSeries FourierSeries::sine(int harmonic, double amplitude) {
    if (harmonic == 0) return {};
    std::vector<double> a(harmonic, 0.0), b(harmonic, 0.0);
    b[harmonic - 1] = amplitude;
    return FourierSeries(0.0, std::move(a), std::move(b));
}

double FourierSeries::a(int n) const noexcept {
    if (n == 0) return a0_;
    return (n >= 1 && n <= order()) ? a_[n - 1] : 0.0;
}

double FourierSeries::b(int n) const noexcept { return (n >= 1 && n <= order()) ? b_[n - 1] : 0.0; }

double FourierSeries::operator()(double theta) const noexcept {
    const double c1 = std::cos(theta);
    const double s1 = std::sin(theta);
    double cn = c1;
    double sn = s1;
    double sum = 0.5 * a0_;
    for (std::size_t n = 0; n < a_.size(); ++n) {
        sum += a_[n] * cn + b_[n] * sn;
        const double c_next = cn * c1 - sn * s1;
        sn = sn * c1 + cn * s1;
        cn = c_next;
    }
    return sum;
}

std::vector<double> FourierSeries::sample(int count) const {
    std::vector<double> out(count);
    for (int k = 0; k < count; ++k) out[k] = (*this)(kTwoPi * k / count);
    return out;
}

FourierSeries FourierSeries::derivative() const {
    std::vector<double> a(a_.size()), b(b_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        a[i] = n * b_[i];
        b[i] = -n * a_[i];
    }
    return FourierSeries(0.0, std::move(a), std::move(b));
}

FourierSeries FourierSeries::shifted(double delta) const {
    std::vector<double> a(a_.size()), b(b_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double c = std::cos(n * delta);
        const double s = std::sin(n * delta);
        a[i] = a_[i] * c + b_[i] * s;
        b[i] = b_[i] * c - a_[i] * s;
    }
    return FourierSeries(a0_, std::move(a), std::move(b));
}

FourierSeries FourierSeries::scaled(double factor) const {
    std::vector<double> a(a_), b(b_);
    for (auto& x : a) x *= factor;
    for (auto& x : b) x *= factor;
    return FourierSeries(a0_ * factor, std::move(a), std::move(b));
}

FourierSeries FourierSeries::truncated(int max_order) const {
    int n = std::min(max_order, order());
    while (n > 0 && a_[n - 1] == 0.0 && b_[n - 1] == 0.0) --n;
    return FourierSeries(a0_, std::vector<double>(a_.begin(), a_.begin() + n),
                         std::vector<double>(b_.begin(), b_.begin() + n));
}

int FourierSeries::effective_order() const noexcept {
    for (int n = order(); n > 0; --n) {
        if (a_[n - 1] != 0.0 || b_[n - 1] != 0.0) return n;
    }
    return 0;
}

bool FourierSeries::is_zero(double tol) const noexcept {
    if (std::abs(a0_) > tol) return false;
    for (std::size_t i = 0; i < a_.size(); ++i) {
        if (std::abs(a_[i]) > tol || std::abs(b_[i]) > tol) return false;
    }
    return true;
}

int FourierSeries::symmetry_order() const noexcept {
    int p = 0;
    for (int n = 1; n <= order(); ++n) {
        if (a_[n - 1] != 0.0 || b_[n - 1] != 0.0) p = std::gcd(p, n);
    }
    return p;
}

FourierSeries operator+(const FourierSeries& f, const FourierSeries& g) {
    const int n = std::max(f.order(), g.order());
    std::vector<double> a(n), b(n);
    for (int i = 1; i <= n; ++i) {
        a[i - 1] = f.a(i) + g.a(i);
        b[i - 1] = f.b(i) + g.b(i);
    }
    return FourierSeries(f.a0() + g.a0(), std::move(a), std::move(b));
}

FourierSeries operator-(const FourierSeries& f, const FourierSeries& g) { return f + g.scaled(-1.0); }

FourierSeries fit(std::span<const double> samples, int order) {
    const int count = static_cast<int>(samples.size());
    if (order < 0 || count < 2 * order + 1) {
        throw Error(ErrorKind::InsufficientResolution,
                    "fit of order " + std::to_string(order) + " needs at least " +
                        std::to_string(2 * order + 1) + " samples, got " + std::to_string(count));
    }
    std::vector<double> cos_table(count), sin_table(count);
    for (int j = 0; j < count; ++j) {
        cos_table[j] = std::cos(kTwoPi * j / count);
        sin_table[j] = std::sin(kTwoPi * j / count);
    }
    double scale = 0.0;
    for (double s : samples) scale = std::max(scale, std::abs(s));
    const double cutoff = kFitTruncation * scale;
    auto clip = [cutoff](double c) { return std::abs(c) < cutoff ? 0.0 : c; };

    const double norm = 2.0 / count;
    const double a0 = norm * std::accumulate(samples.begin(), samples.end(), 0.0);
    std::vector<double> a(order), b(order);
    for (int n = 1; n <= order; ++n) {
        double sc = 0.0;
        double ss = 0.0;
        long long idx = 0;
        for (int k = 0; k < count; ++k) {
            sc += samples[k] * cos_table[idx];
            ss += samples[k] * sin_table[idx];
            idx += n;
            if (idx >= count) idx -= count;
        }
        a[n - 1] = clip(norm * sc);
        b[n - 1] = clip(norm * ss);
    }
    return FourierSeries(clip(a0), std::move(a), std::move(b));
}

double inner(const FourierSeries& f, const FourierSeries& g) {
    double sum = 0.25 * f.a0() * g.a0();
    const int n = std::min(f.order(), g.order());
    for (int i = 1; i <= n; ++i) sum += 0.5 * (f.a(i) * g.a(i) + f.b(i) * g.b(i));
    return sum;
}

double energy(const FourierSeries& f) { return inner(f, f); }

double rms(const FourierSeries& f) { return std::sqrt(energy(f)); }

Extremum locate_max(const FourierSeries& f, int grid) { return locate(f, grid, 1.0); }

Extremum locate_min(const FourierSeries& f, int grid) { return locate(f, grid, -1.0); }

SeriesEvaluator::SeriesEvaluator(const FourierSeries& f) : half_a0_(0.5 * f.a0()) {
    const FourierSeries t = f.truncated(f.order());
    a_.assign(t.cos_coeffs().begin(), t.cos_coeffs().end());
    b_.assign(t.sin_coeffs().begin(), t.sin_coeffs().end());
}

double SeriesEvaluator::operator()(double theta) const noexcept {
    if (a_.empty()) return half_a0_;
    const double c1 = std::cos(theta);
    const double s1 = std::sin(theta);
    double cn = c1;
    double sn = s1;
    double sum = half_a0_;
    const std::size_t n = a_.size();
    for (std::size_t i = 0; i < n; ++i) {
        sum += a_[i] * cn + b_[i] * sn;
        const double c_next = cn * c1 - sn * s1;
        sn = sn * c1 + cn * s1;
        cn = c_next;
    }
    return sum;
}

}  // namespace entrain
