#include "entrain/ode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "entrain/error.hpp"

namespace entrain {

namespace {

// x / (1 - exp(-x/y)) with its removable singularity at x = 0.
double vtrap(double x, double y) {
    const double z = x / y;
    if (std::abs(z) < 1e-3) return y * (1.0 + z / 2.0 + z * z / 12.0);
    return x / (1.0 - std::exp(-z));
}

double vtrap_dx(double x, double y) {
    const double z = x / y;
    if (std::abs(z) < 1e-3) return 0.5 + z / 6.0 - z * z * z / 180.0;
    const double e = std::exp(-z);
    const double d = 1.0 - e;
    return (d - z * e) / (d * d);
}

struct HhRates {
    double am, bm, ah, bh, an, bn;
    double dam, dbm, dah, dbh, dan, dbn;
};

HhRates hh_rates(double V) {
    HhRates r{};
    r.am = 0.1 * vtrap(V + 40.0, 10.0);
    r.dam = 0.1 * vtrap_dx(V + 40.0, 10.0);
    r.bm = 4.0 * std::exp(-(V + 65.0) / 18.0);
    r.dbm = -r.bm / 18.0;
    r.ah = 0.07 * std::exp(-(V + 65.0) / 20.0);
    r.dah = -r.ah / 20.0;
    r.bh = 1.0 / (1.0 + std::exp(-(V + 35.0) / 10.0));
    r.dbh = r.bh * (1.0 - r.bh) / 10.0;
    r.an = 0.01 * vtrap(V + 55.0, 10.0);
    r.dan = 0.01 * vtrap_dx(V + 55.0, 10.0);
    r.bn = 0.125 * std::exp(-(V + 65.0) / 80.0);
    r.dbn = -r.bn / 80.0;
    return r;
}

bool all_finite(const double* x, int n) {
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

}  // namespace

State VectorField::eval(const State& x, double u) const {
    State dx(dimension);
    rhs(x.data(), u, dx.data());
    return dx;
}

void HhParameters::validate() const {
    const double values[] = {V_Na, V_K, V_L, g_Na, g_K, g_L, I_b, c};
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "HH parameters must be finite");
    }
    // g_Na = 0 is allowed so that a non-oscillating field can still be built.
    if (g_Na < 0.0 || g_K <= 0.0 || g_L <= 0.0 || c <= 0.0) {
        throw Error(ErrorKind::InvalidArgument, "conductances and capacitance must be positive");
    }
}

VectorField hh_field(const HhParameters& p) {
    p.validate();
    VectorField f;
    f.dimension = 4;
    f.names = {"V", "m", "h", "n"};
    f.parameters = {{"V_Na", p.V_Na}, {"V_K", p.V_K}, {"V_L", p.V_L}, {"g_Na", p.g_Na},
                    {"g_K", p.g_K},   {"g_L", p.g_L}, {"I_b", p.I_b}, {"c", p.c}};
    f.input_channel = 0;
    f.rhs = [p](const double* x, double u, double* dx) {
        const double V = x[0], m = x[1], h = x[2], n = x[3];
        const HhRates r = hh_rates(V);
        const double m3 = m * m * m;
        const double n4 = n * n * n * n;
        dx[0] = (p.I_b + u - p.g_Na * h * m3 * (V - p.V_Na) - p.g_K * n4 * (V - p.V_K) - p.g_L * (V - p.V_L)) / p.c;
        dx[1] = r.am * (1.0 - m) - r.bm * m;
        dx[2] = r.ah * (1.0 - h) - r.bh * h;
        dx[3] = r.an * (1.0 - n) - r.bn * n;
    };
    f.jacobian = [p](const double* x, double* J) {
        const double V = x[0], m = x[1], h = x[2], n = x[3];
        const HhRates r = hh_rates(V);
        const double m2 = m * m;
        const double n3 = n * n * n;
        J[0] = (-p.g_Na * h * m2 * m - p.g_K * n3 * n - p.g_L) / p.c;
        J[1] = -3.0 * p.g_Na * h * m2 * (V - p.V_Na) / p.c;
        J[2] = -p.g_Na * m2 * m * (V - p.V_Na) / p.c;
        J[3] = -4.0 * p.g_K * n3 * (V - p.V_K) / p.c;

        J[4] = r.dam * (1.0 - m) - r.dbm * m;
        J[5] = -(r.am + r.bm);
        J[6] = 0.0;
        J[7] = 0.0;

        J[8] = r.dah * (1.0 - h) - r.dbh * h;
        J[9] = 0.0;
        J[10] = -(r.ah + r.bh);
        J[11] = 0.0;

        J[12] = r.dan * (1.0 - n) - r.dbn * n;
        J[13] = 0.0;
        J[14] = 0.0;
        J[15] = -(r.an + r.bn);
    };
    return f;
}

VectorField planar_normal_form() {
    VectorField f;
    f.dimension = 2;
    f.names = {"x", "y"};
    f.input_channel = 0;
    f.rhs = [](const double* s, double u, double* ds) {
        const double x = s[0], y = s[1];
        const double g = 1.0 - (x * x + y * y);
        ds[0] = x * g - y + u;
        ds[1] = y * g + x;
    };
    f.jacobian = [](const double* s, double* J) {
        const double x = s[0], y = s[1];
        const double g = 1.0 - (x * x + y * y);
        J[0] = g - 2.0 * x * x;
        J[1] = -2.0 * x * y - 1.0;
        J[2] = -2.0 * x * y + 1.0;
        J[3] = g - 2.0 * y * y;
    };
    return f;
}

void jacobian_fd(const VectorField& field, const double* x, double* jac) {
    const int n = field.dimension;
    std::vector<double> xp(x, x + n), fp(n), fm(n);
    for (int j = 0; j < n; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
        xp[j] = x[j] + h;
        field.rhs(xp.data(), 0.0, fp.data());
        xp[j] = x[j] - h;
        field.rhs(xp.data(), 0.0, fm.data());
        xp[j] = x[j];
        for (int i = 0; i < n; ++i) jac[i * n + j] = (fp[i] - fm[i]) / (2.0 * h);
    }
}

void jacobian(const VectorField& field, const double* x, double* jac) {
    if (field.jacobian) {
        field.jacobian(x, jac);
    } else {
        jacobian_fd(field, x, jac);
    }
}

State input_direction(const VectorField& field, const State& x) {
    constexpr double h = 1e-3;
    const State fp = field.eval(x, h);
    const State fm = field.eval(x, -h);
    State b(field.dimension);
    for (int i = 0; i < field.dimension; ++i) b[i] = (fp[i] - fm[i]) / (2.0 * h);
    return b;
}

Rk4::Rk4(const VectorField& field)
    : field_(field),
      k1_(field.dimension),
      k2_(field.dimension),
      k3_(field.dimension),
      k4_(field.dimension),
      tmp_(field.dimension) {}

void Rk4::step(double* x, double t, double dt, const InputSignal& u) {
    const int n = field_.dimension;
    const double u0 = u ? u(t) : 0.0;
    const double uh = u ? u(t + 0.5 * dt) : 0.0;
    const double u1 = u ? u(t + dt) : 0.0;
    field_.rhs(x, u0, k1_.data());
    for (int i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k1_[i];
    field_.rhs(tmp_.data(), uh, k2_.data());
    for (int i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k2_[i];
    field_.rhs(tmp_.data(), uh, k3_.data());
    for (int i = 0; i < n; ++i) tmp_[i] = x[i] + dt * k3_[i];
    field_.rhs(tmp_.data(), u1, k4_.data());
    for (int i = 0; i < n; ++i) x[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
}

void Rk4::step_autonomous(double* x, double dt) {
    const int n = field_.dimension;
    field_.rhs(x, 0.0, k1_.data());
    for (int i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k1_[i];
    field_.rhs(tmp_.data(), 0.0, k2_.data());
    for (int i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k2_[i];
    field_.rhs(tmp_.data(), 0.0, k3_.data());
    for (int i = 0; i < n; ++i) tmp_[i] = x[i] + dt * k3_[i];
    field_.rhs(tmp_.data(), 0.0, k4_.data());
    for (int i = 0; i < n; ++i) x[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
}

Trajectory integrate(const VectorField& field, const State& x0, const InputSignal& u, double dt, long steps) {
    if (!(dt > 0.0) || steps < 0) throw Error(ErrorKind::InvalidArgument, "dt must be positive and steps nonnegative");
    if (static_cast<int>(x0.size()) != field.dimension) {
        throw Error(ErrorKind::InvalidArgument, "initial state has wrong dimension");
    }
    Trajectory tr;
    tr.dt = dt;
    tr.states.reserve(steps + 1);
    tr.inputs.reserve(steps + 1);
    Rk4 rk(field);
    State x = x0;
    tr.states.push_back(x);
    tr.inputs.push_back(u ? u(0.0) : 0.0);
    for (long k = 0; k < steps; ++k) {
        rk.step(x.data(), k * dt, dt, u);
        if (!all_finite(x.data(), field.dimension)) {
            throw Error(ErrorKind::IntegrationDiverged, "non-finite state at step " + std::to_string(k + 1),
                        static_cast<double>(k + 1));
        }
        tr.states.push_back(x);
        tr.inputs.push_back(u ? u((k + 1) * dt) : 0.0);
    }
    return tr;
}

double LimitCycle::amplitude(int i) const {
    double lo = samples.at(0).at(i), hi = lo;
    for (const auto& s : samples) {
        lo = std::min(lo, s[i]);
        hi = std::max(hi, s[i]);
    }
    return hi - lo;
}

namespace {

// Autonomous integration that reports maxima of x[0] with quadratic
// refinement of the peak time. Keeps the two previous states so the peak
// state can be reconstructed with one partial step.
class PeakTracker {
public:
    PeakTracker(const VectorField& field, State x0, double dt)
        : field_(field), rk_(field), dt_(dt), x_(std::move(x0)), prev_(x_), prev2_(x_) {}

    struct Peak {
        double time;
        double value;
        State state;
    };

    // Advances `steps` steps; calls on_peak(peak) for every local maximum.
    template <typename F>
    void run(long steps, F&& on_peak) {
        for (long s = 0; s < steps; ++s) {
            prev2_ = prev_;
            prev_ = x_;
            rk_.step_autonomous(x_.data(), dt_);
            ++count_;
            if (!all_finite(x_.data(), field_.dimension)) {
                throw Error(ErrorKind::IntegrationDiverged, "non-finite state at step " + std::to_string(count_),
                            static_cast<double>(count_));
            }
            if (count_ < 2) continue;
            const double y0 = prev2_[0], y1 = prev_[0], y2 = x_[0];
            if (y1 > y0 && y1 >= y2) {
                const double denom = y0 - 2.0 * y1 + y2;
                double delta = denom != 0.0 ? 0.5 * dt_ * (y0 - y2) / denom : 0.0;
                delta = std::clamp(delta, -dt_, dt_);
                const double t_mid = (count_ - 1) * dt_;
                const double value = y1 - 0.25 * (y0 - y2) * delta / dt_;
                on_peak(Peak{t_mid + delta, value, {}}, prev2_, dt_ + delta);
            }
        }
    }

    [[nodiscard]] double time() const { return count_ * dt_; }
    [[nodiscard]] const State& state() const { return x_; }

private:
    const VectorField& field_;
    Rk4 rk_;
    double dt_;
    State x_, prev_, prev2_;
    long count_ = 0;
};

}  // namespace

LimitCycle find_limit_cycle(const VectorField& field, const State& x0, const LimitCycleOptions& opts) {
    if (static_cast<int>(x0.size()) != field.dimension) {
        throw Error(ErrorKind::InvalidArgument, "initial state has wrong dimension");
    }
    if (!(opts.dt > 0.0) || opts.resolution < 8 || opts.intervals < 1) {
        throw Error(ErrorKind::InvalidArgument, "invalid limit cycle options");
    }
    const double dt = opts.dt;
    PeakTracker tracker(field, x0, dt);

    // Exploration: estimate the peak interval from prominent maxima.
    double lo = x0[0], hi = x0[0];
    std::vector<double> prominent;
    long explored = 0;
    const long chunk = 1000;
    while (prominent.size() < 4 && explored < opts.max_search_steps) {
        tracker.run(chunk, [&](const PeakTracker::Peak& p, const State&, double) {
            hi = std::max(hi, p.value);
            if (p.value >= lo + 0.5 * (hi - lo)) prominent.push_back(p.time);
        });
        lo = std::min(lo, tracker.state()[0]);
        hi = std::max(hi, tracker.state()[0]);
        explored += chunk;
    }
    if (prominent.size() < 4 || !(hi - lo > 1e-9 * std::max(1.0, std::abs(hi)))) {
        throw Error(ErrorKind::NoLimitCycle, "no sustained oscillation of the first state variable");
    }
    const double interval0 = prominent[3] - prominent[2];
    const double settle = opts.settle_time > 0.0 ? opts.settle_time : opts.settle_periods * interval0;

    double variation = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        tracker.run(static_cast<long>(std::ceil(settle / dt)), [](const auto&, const auto&, double) {});

        // Range of x1 over a bit more than one cycle sets the prominence threshold.
        lo = hi = tracker.state()[0];
        const long range_steps = static_cast<long>(std::ceil(1.5 * interval0 / dt));
        for (long s = 0; s < range_steps; s += 10) {
            tracker.run(10, [](const auto&, const auto&, double) {});
            lo = std::min(lo, tracker.state()[0]);
            hi = std::max(hi, tracker.state()[0]);
        }
        const double threshold = lo + 0.5 * (hi - lo);

        std::vector<double> times;
        State base_start;
        double base_step = 0.0;
        const long limit = static_cast<long>(std::ceil((opts.intervals + 3) * 2.0 * interval0 / dt));
        long used = 0;
        while (static_cast<int>(times.size()) < opts.intervals + 1 && used < limit) {
            tracker.run(1, [&](const PeakTracker::Peak& p, const State& before, double step) {
                if (p.value < threshold) return;
                times.push_back(p.time);
                base_start = before;
                base_step = step;
            });
            ++used;
        }
        if (static_cast<int>(times.size()) < opts.intervals + 1) {
            throw Error(ErrorKind::NoLimitCycle, "oscillation died out during period measurement");
        }
        const double period = (times.back() - times.front()) / opts.intervals;
        variation = 0.0;
        for (std::size_t j = 1; j < times.size(); ++j) {
            variation = std::max(variation, std::abs(times[j] - times[j - 1] - period) / period);
        }
        if (variation > opts.tolerance) continue;

        LimitCycle lc;
        lc.period = period;
        lc.omega = 2.0 * std::numbers::pi / period;
        lc.dt = dt;
        Rk4 rk(field);
        State x = base_start;
        rk.step_autonomous(x.data(), base_step);
        lc.base_point = x;

        const int K = opts.resolution;
        const long sub = std::max<long>(1, static_cast<long>(std::ceil(period / (K * dt))));
        const double h = period / (static_cast<double>(K) * sub);
        lc.samples.reserve(K);
        for (int k = 0; k < K; ++k) {
            lc.samples.push_back(x);
            for (long s = 0; s < sub; ++s) rk.step_autonomous(x.data(), h);
        }
        return lc;
    }
    throw Error(ErrorKind::NotConverged, "peak intervals vary by " + num(variation) + " relative",
                variation);
}

State cycle_state(const VectorField& field, const LimitCycle& cycle, double theta) {
    const double two_pi = 2.0 * std::numbers::pi;
    double th = std::fmod(theta, two_pi);
    if (th < 0.0) th += two_pi;
    const int K = cycle.resolution();
    const double pos = th / two_pi * K;
    int k = static_cast<int>(std::floor(pos));
    double frac = pos - k;
    if (k >= K) {
        k = 0;
        frac = 0.0;
    }
    State x = cycle.samples[k];
    const double tau = frac * cycle.period / K;
    if (tau > 0.0) {
        const long steps = std::max<long>(1, static_cast<long>(std::ceil(tau / cycle.dt)));
        Rk4 rk(field);
        for (long s = 0; s < steps; ++s) rk.step_autonomous(x.data(), tau / steps);
    }
    return x;
}

}  // namespace entrain
