#include "entrain/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "entrain/error.hpp"
#include "entrain/parallel.hpp"

namespace entrain {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Input values at every RK4 half step over one full period of the forced
// system (M entrainment periods), so trajectories can share them.
struct ForcingTable {
    int steps = 0;  // per entrainment period
    int periods = 1;
    double h = 0.0;
    std::vector<double> u;  // size 2 * steps * periods, cyclic

    ForcingTable(const Waveform& w, int steps_per_period) : steps(steps_per_period), periods(w.ratio.M()) {
        const double Te = kTwoPi / w.target;
        h = Te / steps;
        const SeriesEvaluator v(w.v);
        const int n = 2 * steps * periods;
        u.resize(n);
        for (int j = 0; j < n; ++j) u[j] = v(w.omega_f * 0.5 * h * j);
    }

    [[nodiscard]] int size() const { return static_cast<int>(u.size()); }
};

// One RK4 step of psi' = omega + Z(psi) u; `j` is the global step index.
inline double phase_step(const SeriesEvaluator& Z, double omega, const ForcingTable& f, long j, double psi) {
    const int n = f.size();
    const int i0 = static_cast<int>((2 * j) % n);
    const double u0 = f.u[i0];
    const double uh = f.u[i0 + 1];
    const double u1 = f.u[(i0 + 2) % n];
    const double h = f.h;
    const double k1 = omega + Z(psi) * u0;
    const double k2 = omega + Z(psi + 0.5 * h * k1) * uh;
    const double k3 = omega + Z(psi + 0.5 * h * k2) * uh;
    const double k4 = omega + Z(psi + h * k3) * u1;
    return psi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

int round_up(int value, int multiple) { return ((value + multiple - 1) / multiple) * multiple; }

struct Fit {
    double slope = 0.0, intercept = 0.0, residual = 0.0;
};

Fit log_linear_fit(const std::vector<double>& t, const std::vector<double>& y) {
    const double n = static_cast<double>(t.size());
    double st = 0, sy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
    }
    const double mt = st / n, my = sy / n;
    double stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        sty += (t[i] - mt) * (y[i] - my);
    }
    Fit f;
    f.slope = sty / stt;
    f.intercept = my - f.slope * mt;
    double ss = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * t[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

// Contiguous window: after the skipped prefix, from the first value below
// ceiling until the first value below floor.
RateEstimate fit_decay(const std::vector<double>& d, double dt, const RateWindow& w, RateSource source) {
    if (d.empty()) throw Error(ErrorKind::InsufficientData, "empty series");
    const double ceiling = w.ceiling_fraction * d.front();
    // the skipped transient is a fraction of the decaying part, not of the
    // whole record, so long runs of a fast decay keep their window
    std::size_t end = 0;
    while (end < d.size() && d[end] >= w.floor && d[end] != 0.0) ++end;
    const std::size_t skip = static_cast<std::size_t>(std::ceil(w.skip_fraction * static_cast<double>(end)));
    std::vector<double> t, y;
    bool started = false;
    for (std::size_t k = skip; k < d.size(); ++k) {
        if (!started && d[k] > ceiling) continue;
        if (d[k] < w.floor || d[k] == 0.0) break;
        started = true;
        t.push_back(dt * k);
        y.push_back(std::log(d[k]));
    }
    if (t.size() < 8) {
        throw Error(ErrorKind::InsufficientDecay,
                    "only " + std::to_string(t.size()) + " points in the decay window, need 8",
                    static_cast<double>(t.size()));
    }
    const Fit f = log_linear_fit(t, y);
    RateEstimate r;
    r.kappa = f.slope;
    r.intercept = f.intercept;
    r.residual = f.residual;
    r.points = static_cast<int>(t.size());
    r.source = source;
    return r;
}

double detuning(const PhaseModel& pm, const SubharmonicRatio& r, double omega_f) {
    return pm.omega - static_cast<double>(r.M()) / r.N() * omega_f;
}

Waveform forcing(const FourierSeries& shape, const SubharmonicRatio& r, double omega_f, double p) {
    return make_waveform(shape.scaled(p), r, static_cast<double>(r.M()) / r.N() * omega_f, Family::Custom);
}

}  // namespace

std::string_view to_string(RateSource s) { return s == RateSource::Phase ? "phase" : "state"; }

int phase_steps_per_period(const PhaseModel& pm, const Waveform& w) {
    const double input = std::ceil(static_cast<double>(w.v.order()) * w.ratio.N() / w.ratio.M());
    const int fastest = std::max({1, pm.Z.order(), static_cast<int>(input)});
    return std::max(128, 8 * fastest);
}

std::vector<double> integrate_phase(const PhaseModel& pm, const Waveform& w, double psi0, int samples, int stride,
                                    int steps_per_period) {
    if (samples < 0 || stride < 1) throw Error(ErrorKind::InvalidArgument, "samples and stride must be positive");
    if (steps_per_period <= 0) steps_per_period = phase_steps_per_period(pm, w);
    const ForcingTable table(w, steps_per_period);
    const SeriesEvaluator Z(pm.Z);
    std::vector<double> psi{psi0};
    psi.reserve(samples + 1);
    double x = psi0;
    long j = 0;
    const long per_sample = static_cast<long>(stride) * steps_per_period;
    for (int k = 0; k < samples; ++k) {
        for (long s = 0; s < per_sample; ++s, ++j) x = phase_step(Z, pm.omega, table, j, x);
        if (!std::isfinite(x)) {
            throw Error(ErrorKind::IntegrationDiverged, "phase diverged at step " + std::to_string(j),
                        static_cast<double>(j));
        }
        psi.push_back(x);
    }
    return psi;
}

PhaseReturnMap::PhaseReturnMap(const PhaseModel& pm, const Waveform& w, int grid, int steps_per_period) {
    if (grid < 16) throw Error(ErrorKind::InvalidArgument, "return map grid too small");
    if (steps_per_period <= 0) steps_per_period = phase_steps_per_period(pm, w);
    const ForcingTable table(w, steps_per_period);
    const SeriesEvaluator Z(pm.Z);
    periods_ = w.ratio.M();
    span_ = periods_ * kTwoPi / w.target;
    advance_ = pm.omega * span_;
    const long total = static_cast<long>(steps_per_period) * periods_;
    std::vector<double> drift(grid);
    for (int i = 0; i < grid; ++i) {
        const double start = kTwoPi * i / grid;
        double x = start;
        for (long j = 0; j < total; ++j) x = phase_step(Z, pm.omega, table, j, x);
        drift[i] = x - start - advance_;
    }
    drift_ = fit(drift, grid / 2 - 1);
    eval_ = SeriesEvaluator(drift_);
}

double PhaseReturnMap::operator()(double psi) const { return psi + advance_ + eval_(psi); }

EntrainmentVerdict detect_entrainment_phase(const std::vector<double>& psi, double omega_e, int stride,
                                            double tolerance) {
    if (psi.size() < 51) {
        throw Error(ErrorKind::InsufficientData, "need at least 51 samples, got " + std::to_string(psi.size()),
                    static_cast<double>(psi.size()));
    }
    (void)omega_e;  // Omega * T_e = 2 pi, so phi_k needs only the stride
    EntrainmentVerdict v;
    v.series.resize(psi.size());
    for (std::size_t k = 0; k < psi.size(); ++k) v.series[k] = psi[k] - kTwoPi * static_cast<double>(k) * stride;
    double dev = 0.0;
    for (int k = 46; k <= 50; ++k) dev = std::max(dev, std::abs(v.series[k] - v.series[46]));
    v.locked = dev <= tolerance;
    if (v.locked) v.asymptote = wrap_phase(v.series.back(), kTwoPi);
    return v;
}

EntrainmentVerdict detect_entrainment_state(const VectorField& field, const LimitCycle& cycle, const Waveform& w,
                                            const StateSimOptions& opts) {
    if (opts.first < 0 || opts.last <= opts.first || opts.stride < 1) {
        throw Error(ErrorKind::InvalidArgument, "invalid sampling window");
    }
    const double dt = opts.dt > 0.0 ? opts.dt : cycle.dt;
    const double Te = kTwoPi / w.target;
    const long n = static_cast<long>(std::ceil(Te / dt - 1e-9));
    const double h = Te / n;
    const SeriesEvaluator v(w.v);
    const double wf = w.omega_f;
    const InputSignal u = [&](double t) { return v(wf * t); };

    State x = cycle_state(field, cycle, opts.theta0);
    Rk4 rk(field);
    const long per_sample = n * opts.stride;
    std::vector<double> y{x[0]};
    y.reserve(opts.last + 1);
    long j = 0;
    for (int k = 1; k <= opts.last; ++k) {
        for (long s = 0; s < per_sample; ++s, ++j) rk.step(x.data(), h * j, h, u);
        for (double xi : x) {
            if (!std::isfinite(xi)) {
                throw Error(ErrorKind::IntegrationDiverged, "state diverged before step " + std::to_string(j),
                            static_cast<double>(j));
            }
        }
        y.push_back(x[0]);
    }
    const double tol = opts.tolerance * cycle.amplitude(0);
    double dev = 0.0;
    for (int k = opts.first; k <= opts.last; ++k) dev = std::max(dev, std::abs(y[k] - y[opts.first]));
    EntrainmentVerdict verdict;
    verdict.locked = dev <= tol;
    if (verdict.locked) verdict.asymptote = y[opts.last];
    verdict.series = std::move(y);
    return verdict;
}

std::vector<double> forced_peak_times(const VectorField& field, const LimitCycle& cycle, const Waveform& w,
                                      double theta0, double duration, double dt) {
    if (dt <= 0.0) dt = cycle.dt;
    double lo = cycle.samples.front()[0], hi = lo;
    for (const auto& s : cycle.samples) {
        lo = std::min(lo, s[0]);
        hi = std::max(hi, s[0]);
    }
    const double threshold = 0.5 * (lo + hi);
    const SeriesEvaluator v(w.v);
    const double wf = w.omega_f;
    const InputSignal u = [&](double t) { return v(wf * t); };

    State x = cycle_state(field, cycle, theta0);
    Rk4 rk(field);
    const long steps = static_cast<long>(std::ceil(duration / dt));
    std::vector<double> peaks;
    double y0 = x[0], y1 = x[0];
    for (long j = 0; j < steps; ++j) {
        rk.step(x.data(), dt * j, dt, u);
        const double y2 = x[0];
        if (!std::isfinite(y2)) {
            throw Error(ErrorKind::IntegrationDiverged, "state diverged at step " + std::to_string(j),
                        static_cast<double>(j));
        }
        if (j >= 1 && y1 > y0 && y1 >= y2 && y1 > threshold) {
            const double denom = y0 - 2.0 * y1 + y2;
            double delta = denom != 0.0 ? 0.5 * dt * (y0 - y2) / denom : 0.0;
            delta = std::clamp(delta, -dt, dt);
            peaks.push_back(dt * j + delta);  // y1 sits at time j * dt
        }
        y0 = y1;
        y1 = y2;
    }
    return peaks;
}

double min_power_bisection(const LockTest& lock, double estimate, const BisectionOptions& opts) {
    if (!(estimate > 0.0) || !std::isfinite(estimate)) {
        throw Error(ErrorKind::InvalidArgument, "power estimate must be positive");
    }
    double lo = opts.lower * estimate, hi = opts.upper * estimate;
    int expansions = 0;
    while (lock(lo)) {
        if (expansions++ >= opts.max_expansions) {
            throw Error(ErrorKind::NoBoundaryFound, "locked at every trial power down to " + num(lo), lo);
        }
        hi = lo;
        lo /= opts.expansion;
    }
    while (!lock(hi)) {
        if (expansions++ >= opts.max_expansions) {
            throw Error(ErrorKind::NoBoundaryFound, "no lock up to " + num(hi), hi);
        }
        lo = hi;
        hi *= opts.expansion;
    }
    while (hi - lo > opts.width * estimate) {
        const double mid = 0.5 * (lo + hi);
        (lock(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double slip_time(const PhaseModel& pm, const FourierSeries& unit_shape, const SubharmonicRatio& r, double omega_f,
                 double p) {
    const double dw = detuning(pm, r, omega_f);
    const InteractionFn fn = interaction(pm.Z, unit_shape, r);
    const SeriesEvaluator L(fn.lambda);
    constexpr int grid = 4096;
    const double span = kTwoPi / r.N();
    const double h = span / grid;
    double total = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < grid; ++i) {
        const double g = dw + p * L((i + 0.5) * h);
        lo = std::min(lo, g);
        hi = std::max(hi, g);
        total += h / std::abs(g);
    }
    if (lo <= 0.0 && hi >= 0.0) return std::numeric_limits<double>::infinity();
    return total;
}

double initial_slow_phase(const PhaseModel& pm, const FourierSeries& unit_shape, const SubharmonicRatio& r,
                          double omega_f, double p) {
    const double dw = detuning(pm, r, omega_f);
    const InteractionFn fn = interaction(pm.Z, unit_shape.scaled(p), r);
    const FixedPoints fp = fixed_points(fn, dw);
    if (!fp.stable.empty()) return fp.stable.front();
    constexpr int grid = 4096;
    double best = 0.0, best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        const double phi = kTwoPi * i / grid;
        const double g = std::abs(dw + fn.lambda(phi));
        if (g < best_val) {
            best_val = g;
            best = phi;
        }
    }
    return best;
}

LockTest phase_lock_test(const PhaseModel& pm, const FourierSeries& unit_shape, const SubharmonicRatio& r,
                         double omega_f, double estimate, const LockTestOptions& opts) {
    const double Te = kTwoPi * r.N() / (r.M() * omega_f);
    const double slip = slip_time(pm, unit_shape, r, omega_f, opts.slip_margin * estimate);
    int stride = opts.max_stride;
    if (std::isfinite(slip)) stride = static_cast<int>(std::clamp(std::ceil(slip / (4.0 * Te)), 1.0, double(opts.max_stride)));
    stride = round_up(stride, r.M());
    return [=](double p) {
        const Waveform w = forcing(unit_shape, r, omega_f, p);
        const PhaseReturnMap map(pm, w, opts.map_grid, opts.steps_per_period);
        const int per_sample = stride / map.periods();
        std::vector<double> psi{initial_slow_phase(pm, unit_shape, r, omega_f, p)};
        for (int k = 1; k <= 50; ++k) {
            double x = psi.back();
            for (int i = 0; i < per_sample; ++i) x = map(x);
            psi.push_back(x);
        }
        return detect_entrainment_phase(psi, w.target, stride).locked;
    };
}

LockTest state_lock_test(const VectorField& field, const LimitCycle& cycle, const PhaseModel& pm,
                         const FourierSeries& unit_shape, const SubharmonicRatio& r, double omega_f,
                         double estimate, const StateLockOptions& opts) {
    const double Te = kTwoPi * r.N() / (r.M() * omega_f);
    const double slip = slip_time(pm, unit_shape, r, omega_f, opts.slip_margin * estimate);
    int stride = opts.max_stride;
    if (std::isfinite(slip)) {
        stride = static_cast<int>(std::clamp(std::ceil(slip / (100.0 * Te)), 1.0, double(opts.max_stride)));
    }
    stride = round_up(stride, r.M());
    StateSimOptions sim;
    sim.dt = opts.dt;
    sim.stride = stride;
    // field and cycle are borrowed; callers keep them alive for the test's lifetime
    return [&field, &cycle, unit_shape, r, omega_f, sim](double p) {
        return detect_entrainment_state(field, cycle, forcing(unit_shape, r, omega_f, p), sim).locked;
    };
}

SweepResult tongue_sweep(const std::vector<BoundaryJob>& jobs, AxisKind axis, const SubharmonicRatio& r,
                         int threads) {
    std::vector<std::optional<double>> found(jobs.size());
    parallel_for(static_cast<int>(jobs.size()), threads, [&](int i) {
        try {
            found[i] = min_power_bisection(jobs[i].lock, jobs[i].estimate);
        } catch (const Error&) {
            found[i].reset();
        }
    });
    SweepResult out;
    out.boundary.axis = axis;
    out.boundary.ratio = r;
    std::map<double, TonguePoint> by_abscissa;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        TonguePoint& pt = by_abscissa[jobs[i].abscissa];
        pt.abscissa = jobs[i].abscissa;
        if (!found[i]) ++out.failures;
        (jobs[i].side == Side::Left ? pt.p_left : pt.p_right) = found[i];
    }
    for (auto& [a, pt] : by_abscissa) out.boundary.points.push_back(pt);
    return out;
}

RateEstimate rate_phase(const std::vector<double>& psi, double omega_e, std::optional<double> phi_star, int stride,
                        const RateWindow& window) {
    if (psi.size() < 9) throw Error(ErrorKind::InsufficientData, "series too short for a rate fit");
    const double Te = kTwoPi / omega_e;
    std::vector<double> d;
    if (phi_star) {
        for (std::size_t k = 0; k < psi.size(); ++k) {
            const double phi = psi[k] - kTwoPi * static_cast<double>(k) * stride;
            d.push_back(std::abs(std::remainder(phi - *phi_star, kTwoPi)));
        }
    } else {
        for (std::size_t k = 0; k + 1 < psi.size(); ++k) d.push_back(std::abs(psi[k + 1] - psi[k] - kTwoPi * stride));
    }
    return fit_decay(d, Te * stride, window, RateSource::Phase);
}

RateEstimate rate_state(const std::vector<double>& peak_times, double omega_e, const RateWindow& window) {
    if (peak_times.size() < 20) {
        throw Error(ErrorKind::InsufficientData, "need at least 20 peaks, got " + std::to_string(peak_times.size()),
                    static_cast<double>(peak_times.size()));
    }
    const double Te = kTwoPi / omega_e;
    std::vector<double> d;
    double largest = 0.0;
    for (std::size_t j = 0; j + 1 < peak_times.size(); ++j) {
        d.push_back(std::abs(kTwoPi * (Te - (peak_times[j + 1] - peak_times[j])) / Te));
        largest = std::max(largest, d.back());
    }
    if (largest < 1e-12) throw Error(ErrorKind::InsufficientDecay, "phase increments already converged", largest);
    return fit_decay(d, Te, window, RateSource::State);
}

}  // namespace entrain
