#include "entrain/interaction.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

#include "entrain/error.hpp"

namespace entrain {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kRootGrid = 4096;

int parse_int(std::string_view s) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorKind::InvalidArgument, "malformed ratio component '" + std::string(s) + "'");
    }
    return value;
}
}  // namespace

SubharmonicRatio::SubharmonicRatio(int N, int M) : N_(N), M_(M) {
    if (N <= 0 || M <= 0) throw Error(ErrorKind::InvalidArgument, "ratio components must be positive");
    if (std::gcd(N, M) != 1) throw Error(ErrorKind::InvalidArgument, "ratio must be coprime");
}

SubharmonicRatio SubharmonicRatio::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw Error(ErrorKind::InvalidArgument, "ratio must have the form N:M");
    }
    return {parse_int(text.substr(0, colon)), parse_int(text.substr(colon + 1))};
}

std::string SubharmonicRatio::str() const { return std::to_string(N_) + ":" + std::to_string(M_); }

FourierSeries y_nm(const FourierSeries& Z, const SubharmonicRatio& r, double phi) {
    const int N = r.N(), M = r.M();
    const int kmax = Z.order() / N;
    std::vector<double> c(M * kmax, 0.0), d(M * kmax, 0.0);
    for (int k = 1; k <= kmax; ++k) {
        const double beta = N * k * phi;
        const double a = Z.a(N * k), b = Z.b(N * k);
        c[M * k - 1] = a * std::cos(beta) + b * std::sin(beta);
        d[M * k - 1] = -a * std::sin(beta) + b * std::cos(beta);
    }
    return FourierSeries(Z.a0(), std::move(c), std::move(d));
}

FourierSeries y_nm_phi(const FourierSeries& Z, const SubharmonicRatio& r, double phi) {
    return y_nm(Z.derivative(), r, phi);
}

FourierSeries autocorrelation(const FourierSeries& Z) {
    std::vector<double> a(Z.order()), b(Z.order(), 0.0);
    for (int n = 1; n <= Z.order(); ++n) a[n - 1] = 0.5 * (Z.a(n) * Z.a(n) + Z.b(n) * Z.b(n));
    // constant term a0^2/4 is stored as a0 = a0^2/2
    return FourierSeries(0.5 * Z.a0() * Z.a0(), std::move(a), std::move(b));
}

FourierSeries subharmonic_average(const FourierSeries& Q, const SubharmonicRatio& r) {
    const int N = r.N();
    std::vector<double> a(Q.order(), 0.0), b(Q.order(), 0.0);
    for (int n = N; n <= Q.order(); n += N) {
        a[n - 1] = Q.a(n);
        b[n - 1] = Q.b(n);
    }
    return FourierSeries(Q.a0(), std::move(a), std::move(b)).truncated(Q.order());
}

StructureFunctions structure_functions(const FourierSeries& Z, const SubharmonicRatio& r) {
    StructureFunctions sf;
    sf.Q = autocorrelation(Z);
    sf.V = subharmonic_average(sf.Q, r);
    sf.K = autocorrelation(Z.derivative());
    sf.S = subharmonic_average(sf.K, r);
    sf.V0 = sf.V(0.0);
    const Extremum vmin = locate_min(sf.V);
    sf.phi_star = vmin.phase;
    sf.V_star = sf.V(sf.phi_star);
    sf.S0 = sf.S(0.0);
    sf.S_star = locate_min(sf.S).value;
    return sf;
}

InteractionFn interaction(const FourierSeries& Z, const FourierSeries& v, const SubharmonicRatio& r) {
    const int N = r.N(), M = r.M();
    const int kmax = std::min(Z.order() / N, v.order() / M);
    std::vector<double> a(N * kmax, 0.0), b(N * kmax, 0.0);
    for (int k = 1; k <= kmax; ++k) {
        const double za = Z.a(N * k), zb = Z.b(N * k);
        const double vc = v.a(M * k), vd = v.b(M * k);
        a[N * k - 1] = 0.5 * (za * vc + zb * vd);
        b[N * k - 1] = 0.5 * (zb * vc - za * vd);
    }
    InteractionFn fn;
    fn.ratio = r;
    fn.lambda = FourierSeries(0.5 * Z.a0() * v.a0(), std::move(a), std::move(b)).truncated(N * kmax);
    const Extremum mx = locate_max(fn.lambda);
    const Extremum mn = locate_min(fn.lambda);
    fn.phi_plus = mx.phase;
    fn.lambda_max = mx.value;
    fn.phi_minus = mn.phase;
    fn.lambda_min = mn.value;
    return fn;
}

std::vector<double> interaction_quadrature(const FourierSeries& Z, const FourierSeries& v,
                                           const SubharmonicRatio& r, const std::vector<double>& phis, int grid) {
    if (grid < 2048) throw Error(ErrorKind::InvalidArgument, "quadrature grid must have at least 2048 points");
    const SeriesEvaluator ze(Z), ve(v);
    std::vector<double> vs(grid);
    for (int k = 0; k < grid; ++k) vs[k] = ve(r.N() * kTwoPi * k / grid);
    std::vector<double> out;
    out.reserve(phis.size());
    for (double phi : phis) {
        double s = 0.0;
        for (int k = 0; k < grid; ++k) s += ze(r.M() * kTwoPi * k / grid + phi) * vs[k];
        out.push_back(s / grid);
    }
    return out;
}

bool entrainment_exists(const FourierSeries& Z, const FourierSeries& v, const SubharmonicRatio& r) {
    return !interaction(Z, v, r).lambda.is_zero(1e-12);
}

FixedPoints fixed_points(const InteractionFn& fn, double dw) {
    FixedPoints fp;
    const FourierSeries& L = fn.lambda;
    const FourierSeries dL = L.derivative();
    auto g = [&](double x) { return dw + L(x); };
    const double h = kTwoPi / kRootGrid;
    auto classify = [&](double root) {
        root = wrap_phase(root, kTwoPi);
        (dL(root) < 0.0 ? fp.stable : fp.unstable).push_back(root);
    };
    // cyclic scan: the closing cell reuses g(0) so a root at the wrap is seen once
    std::vector<double> gs(kRootGrid);
    for (int i = 0; i < kRootGrid; ++i) gs[i] = g(h * i);
    double x0 = 0.0;
    double g0 = gs[0];
    for (int i = 1; i <= kRootGrid; ++i) {
        const double x1 = h * i;
        const double g1 = gs[i % kRootGrid];
        if (g0 == 0.0) {
            classify(x0);
        } else if (g0 * g1 < 0.0) {
            double lo = x0, hi = x1, glo = g0;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                const double gm = g(mid);
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((gm < 0.0) == (glo < 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            classify(0.5 * (lo + hi));
        }
        x0 = x1;
        g0 = g1;
    }
    return fp;
}

}  // namespace entrain
