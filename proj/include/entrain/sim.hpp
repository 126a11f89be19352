#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "entrain/arnold.hpp"
#include "entrain/ode.hpp"
#include "entrain/phase_reduce.hpp"
#include "entrain/synthesis.hpp"

namespace entrain {

struct EntrainmentVerdict {
    bool locked = false;
    std::vector<double> series;  // slow phases (phase model) or x1 samples (state model)
    std::optional<double> asymptote;
};

enum class RateSource { Phase, State };
std::string_view to_string(RateSource s);

struct RateEstimate {
    double kappa = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS of the log regression
    int points = 0;
    RateSource source = RateSource::Phase;
};

// RK4 steps per entrainment period used when the caller passes 0.
int phase_steps_per_period(const PhaseModel& pm, const Waveform& w);

// psi(k * stride * T_e) for k = 0..samples, T_e = 2 pi / Omega, input u(t) = v(Omega_f t).
std::vector<double> integrate_phase(const PhaseModel& pm, const Waveform& w, double psi0, int samples,
                                    int stride = 1, int steps_per_period = 0);

// Lifted stroboscopic map of the forced phase equation over M entrainment
// periods (one full period of the forced system), tabulated on a phase grid
// and stored as a Fourier series so it can be iterated cheaply.
class PhaseReturnMap {
public:
    PhaseReturnMap(const PhaseModel& pm, const Waveform& w, int grid = 512, int steps_per_period = 0);

    [[nodiscard]] double operator()(double psi) const;
    [[nodiscard]] double span() const { return span_; }  // M * T_e
    [[nodiscard]] int periods() const { return periods_; }

private:
    double advance_ = 0.0;  // omega * span
    double span_ = 0.0;
    int periods_ = 1;
    FourierSeries drift_;
    SeriesEvaluator eval_{FourierSeries{}};
};

// Slow phase phi_k = psi_k - Omega k (stride T_e); locked iff samples 46..50
// stay within `tolerance` of sample 46.
EntrainmentVerdict detect_entrainment_phase(const std::vector<double>& psi, double omega_e, int stride = 1,
                                            double tolerance = 0.1);

struct StateSimOptions {
    double dt = 0.0;  // <= 0: the cycle's step
    int stride = 1;
    double theta0 = 0.0;
    double tolerance = 1e-2;  // relative to the unforced peak-to-peak amplitude of x1
    int first = 200;
    int last = 250;
};

EntrainmentVerdict detect_entrainment_state(const VectorField& field, const LimitCycle& cycle, const Waveform& w,
                                            const StateSimOptions& opts = {});

// Times of prominent x1 maxima of the forced system started on the cycle at
// theta0, with quadratic sub-step refinement.
std::vector<double> forced_peak_times(const VectorField& field, const LimitCycle& cycle, const Waveform& w,
                                      double theta0, double duration, double dt = 0.0);

using LockTest = std::function<bool(double rms)>;

struct BisectionOptions {
    double lower = 0.9;
    double upper = 1.1;
    double expansion = 1.5;
    int max_expansions = 8;
    double width = 0.01;  // relative to the estimate
};

double min_power_bisection(const LockTest& lock, double estimate, const BisectionOptions& opts = {});

// Time for the averaged slow phase to slip through one period of Lambda at
// rms power p; infinite when a fixed point exists.
double slip_time(const PhaseModel& pm, const FourierSeries& unit_shape, const SubharmonicRatio& r, double omega_f,
                 double p);

// Initial slow phase: a stable fixed point of the averaged equation or, when
// none exists, the bottleneck where |dw + Lambda| is smallest.
double initial_slow_phase(const PhaseModel& pm, const FourierSeries& unit_shape, const SubharmonicRatio& r,
                          double omega_f, double p);

struct LockTestOptions {
    double slip_margin = 0.995;  // stride sized for a slip at this fraction of the estimate
    int max_stride = 10000;
    int map_grid = 512;
    int steps_per_period = 0;
};

LockTest phase_lock_test(const PhaseModel& pm, const FourierSeries& unit_shape, const SubharmonicRatio& r,
                         double omega_f, double estimate, const LockTestOptions& opts = {});

struct StateLockOptions {
    double slip_margin = 0.97;
    int max_stride = 50;
    double dt = 0.0;
};

LockTest state_lock_test(const VectorField& field, const LimitCycle& cycle, const PhaseModel& pm,
                         const FourierSeries& unit_shape, const SubharmonicRatio& r, double omega_f,
                         double estimate, const StateLockOptions& opts = {});

enum class Side { Left, Right };

struct BoundaryJob {
    double abscissa = 0.0;
    Side side = Side::Left;
    double estimate = 0.0;
    LockTest lock;
};

struct SweepResult {
    TongueBoundary boundary;
    int failures = 0;
};

// Runs one bisection per job on up to `jobs` threads. Failed points are absent.
SweepResult tongue_sweep(const std::vector<BoundaryJob>& jobs, AxisKind axis, const SubharmonicRatio& r,
                         int threads = 0);

struct RateWindow {
    double skip_fraction = 0.1;  // of the samples before the floor is reached
    double floor = 1e-4;
    double ceiling_fraction = 0.5;  // of the initial offset
};

// Log-linear fit of |phi_k - phi*| against k stride T_e. Without phi* the
// successive differences are fitted instead.
RateEstimate rate_phase(const std::vector<double>& psi, double omega_e, std::optional<double> phi_star,
                        int stride = 1, const RateWindow& window = {});

// Log-linear fit of the per-cycle phase increments 2 pi (T_e - dt_j) / T_e.
RateEstimate rate_state(const std::vector<double>& peak_times, double omega_e,
                        const RateWindow& window = {0.1, 1e-5, 1.0});

}  // namespace entrain
