#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace entrain {

using State = std::vector<double>;

// dx = f(x, u). Buffers are sized `dimension`.
using Rhs = std::function<void(const double* x, double u, double* dx)>;
// Row-major Jacobian of f(., 0) with respect to x.
using JacobianFn = std::function<void(const double* x, double* jac)>;
using InputSignal = std::function<double(double t)>;

struct VectorField {
    int dimension = 0;
    std::map<std::string, double> parameters;
    std::vector<std::string> names;
    Rhs rhs;
    JacobianFn jacobian;  // optional analytic fast path
    int input_channel = 0;

    [[nodiscard]] State eval(const State& x, double u = 0.0) const;
};

struct HhParameters {
    double V_Na = 50.0;
    double V_K = -77.0;
    double V_L = -54.4;
    double g_Na = 120.0;
    double g_K = 36.0;
    double g_L = 0.3;
    double I_b = 10.0;
    double c = 1.0;

    void validate() const;
};

VectorField hh_field(const HhParameters& params);

// Hopf normal form rotating at unit speed: r' = r(1 - r^2), theta' = 1, input on x.
VectorField planar_normal_form();

// Central-difference Jacobian with step 1e-6 * max(1, |x_i|), or the analytic
// one when the field provides it.
void jacobian(const VectorField& field, const double* x, double* jac);
void jacobian_fd(const VectorField& field, const double* x, double* jac);

// d f / d u by central difference in u.
State input_direction(const VectorField& field, const State& x);

// Classical RK4 with preallocated stages.
class Rk4 {
public:
    explicit Rk4(const VectorField& field);

    // Advances x in place from t to t + dt.
    void step(double* x, double t, double dt, const InputSignal& u);
    void step_autonomous(double* x, double dt);

private:
    const VectorField& field_;
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

struct Trajectory {
    double dt = 0.0;
    std::vector<State> states;
    std::vector<double> inputs;
};

Trajectory integrate(const VectorField& field, const State& x0, const InputSignal& u, double dt, long steps);

struct LimitCycle {
    double period = 0.0;
    double omega = 0.0;
    std::vector<State> samples;  // samples[k] at theta = 2 pi k / K
    State base_point;
    double dt = 0.0;  // integration step used to build it

    [[nodiscard]] int resolution() const { return static_cast<int>(samples.size()); }
    // Peak-to-peak amplitude of component i over the samples.
    [[nodiscard]] double amplitude(int i) const;
};

struct LimitCycleOptions {
    double dt = 0.001;
    double settle_time = 0.0;  // <= 0: settle_periods times the first peak interval
    double settle_periods = 20.0;
    int resolution = 4096;
    int intervals = 10;
    double tolerance = 1e-6;
    long max_search_steps = 20'000'000;
};

LimitCycle find_limit_cycle(const VectorField& field, const State& x0, const LimitCycleOptions& opts = {});

// State on the cycle at phase theta, integrating forward from the nearest sample.
State cycle_state(const VectorField& field, const LimitCycle& cycle, double theta);

}  // namespace entrain
