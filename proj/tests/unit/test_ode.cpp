#include <cmath>
#include <numbers>

#include "doctest.h"
#include "entrain/error.hpp"
#include "entrain/ode.hpp"

using namespace entrain;

namespace {

VectorField decay_field() {
    VectorField f;
    f.dimension = 2;
    f.rhs = [](const double* x, double u, double* dx) {
        dx[0] = -x[0] + u;
        dx[1] = 0.0;
    };
    return f;
}

State hh_start() { return {-65.0, 0.05, 0.6, 0.32}; }

}  // namespace

TEST_CASE("rk4 on linear decay") {
    const Trajectory tr = integrate(decay_field(), {1.0, 0.0}, nullptr, 0.1, 10);
    REQUIRE(tr.states.size() == 11);
    CHECK(tr.states[0][0] == 1.0);
    CHECK(std::abs(tr.states.back()[0] - std::exp(-1.0)) < 1e-6);
}

TEST_CASE("planar normal form stays on the unit circle") {
    const VectorField f = planar_normal_form();
    const double dt = 2.0 * std::numbers::pi / 6000;
    const Trajectory tr = integrate(f, {1.0, 0.0}, nullptr, dt, 6000);
    double worst = 0.0;
    for (const auto& s : tr.states) worst = std::max(worst, std::abs(std::hypot(s[0], s[1]) - 1.0));
    CHECK(worst < 1e-8);
}

TEST_CASE("integrate reports divergence") {
    VectorField f;
    f.dimension = 2;
    f.rhs = [](const double* x, double, double* dx) {
        dx[0] = x[0] * x[0];
        dx[1] = 0.0;
    };
    CHECK_THROWS_AS(integrate(f, {1.0, 0.0}, nullptr, 0.5, 100), Error);
}

TEST_CASE("hh field evaluates finitely") {
    const VectorField f = hh_field({});
    const State d = f.eval(hh_start());
    for (double v : d) CHECK(std::isfinite(v));
    CHECK(std::abs(d[0]) > 0.0);

    HhParameters p;
    p.g_Na = 0.0;
    const State d0 = hh_field(p).eval(hh_start());
    for (double v : d0) CHECK(std::isfinite(v));

    // the removable singularity of the rate functions
    const State at_sing = f.eval({-40.0, 0.1, 0.5, 0.3});
    const State near_sing = f.eval({-40.0 + 1e-9, 0.1, 0.5, 0.3});
    for (int i = 0; i < 4; ++i) CHECK(at_sing[i] == doctest::Approx(near_sing[i]).epsilon(1e-8));

    p = HhParameters{};
    p.c = 0.0;
    CHECK_THROWS_AS(hh_field(p), Error);
}

TEST_CASE("analytic jacobian matches finite differences") {
    const VectorField f = hh_field({});
    for (const State& x : {hh_start(), State{-40.0, 0.2, 0.4, 0.5}, State{20.0, 0.9, 0.1, 0.7}, State{-55.0, 0.1, 0.5, 0.4}}) {
        double ja[16], jf[16];
        jacobian(f, x.data(), ja);
        jacobian_fd(f, x.data(), jf);
        for (int i = 0; i < 16; ++i) CHECK(ja[i] == doctest::Approx(jf[i]).epsilon(1e-6).scale(1.0));
    }
    const State b = input_direction(f, hh_start());
    CHECK(b[0] == doctest::Approx(1.0));
    CHECK(std::abs(b[1]) < 1e-12);
}

TEST_CASE("planar limit cycle") {
    LimitCycleOptions opts;
    opts.dt = 0.001;
    opts.resolution = 1024;
    const LimitCycle lc = find_limit_cycle(planar_normal_form(), {0.5, 0.0}, opts);
    CHECK(std::abs(lc.period - 2.0 * std::numbers::pi) < 1e-8);
    CHECK(lc.omega * lc.period == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
    CHECK(std::abs(lc.base_point[0] - 1.0) < 1e-8);
    CHECK(std::abs(lc.base_point[1]) < 1e-6);
}

TEST_CASE("non-oscillating field is rejected") {
    LimitCycleOptions opts;
    opts.max_search_steps = 200000;
    CHECK_THROWS_AS(find_limit_cycle(decay_field(), {1.0, 0.0}, opts), Error);
}

TEST_CASE("hh limit cycle properties") {
    const VectorField f = hh_field({});
    const LimitCycle lc = find_limit_cycle(f, hh_start());
    CHECK(std::abs(lc.period - 14.63842) < 1e-4);
    REQUIRE(lc.resolution() == 4096);

    int argmax = 0;
    for (int k = 1; k < lc.resolution(); ++k) {
        if (lc.samples[k][0] > lc.samples[argmax][0]) argmax = k;
    }
    CHECK(argmax == 0);

    // closure after one period
    const long steps = 14639;
    const Trajectory tr = integrate(f, lc.base_point, nullptr, lc.period / steps, steps);
    for (int i = 0; i < 4; ++i) {
        const double scale = std::max(1.0, std::abs(lc.base_point[i]));
        CHECK(std::abs(tr.states.back()[i] - lc.base_point[i]) <= 1e-6 * scale);
    }
}

TEST_CASE("rk4 convergence order on hh") {
    const VectorField f = hh_field({});
    const State x0 = {-60.0, 0.1, 0.5, 0.4};
    const double horizon = 14.6;
    auto run = [&](double dt) {
        const long steps = std::lround(horizon / dt);
        return integrate(f, x0, nullptr, dt, steps);
    };
    const double dt = 0.01;
    const Trajectory ref = run(dt / 10);
    const Trajectory coarse = run(dt);
    const Trajectory fine = run(dt / 2);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t k = 0; k < coarse.states.size(); ++k) {
        e1 = std::max(e1, std::abs(coarse.states[k][0] - ref.states[k * 10][0]));
        e2 = std::max(e2, std::abs(fine.states[2 * k][0] - ref.states[k * 10][0]));
    }
    const double ratio = e1 / e2;
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("scaled hh period matches a refined-step run") {
    HhParameters p;
    for (double* x : {&p.V_Na, &p.V_K, &p.V_L, &p.g_Na, &p.g_K, &p.g_L, &p.I_b}) *x *= 1.02;
    const VectorField f = hh_field(p);
    LimitCycleOptions coarse;
    coarse.resolution = 256;
    LimitCycleOptions fine = coarse;
    fine.dt = coarse.dt / 10;
    const double T = find_limit_cycle(f, hh_start(), coarse).period;
    const double ref = find_limit_cycle(f, hh_start(), fine).period;
    CHECK(std::abs(T - ref) < 1e-4);
    CHECK(std::abs(T - 14.63842) > 1e-2);  // the scaling does change the period
}
