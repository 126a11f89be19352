#include <cmath>
#include <numbers>

#include "doctest.h"
#include "entrain/error.hpp"
#include "entrain/phase_reduce.hpp"
#include "helpers.hpp"

using namespace entrain;

namespace {

const LimitCycle& planar_cycle() {
    static const LimitCycle lc = [] {
        LimitCycleOptions o;
        o.resolution = 1024;
        return find_limit_cycle(planar_normal_form(), {0.5, 0.0}, o);
    }();
    return lc;
}

const LimitCycle& hh_cycle() {
    static const LimitCycle lc = find_limit_cycle(hh_field({}), {-65.0, 0.05, 0.6, 0.32});
    return lc;
}

double sup_vs_minus_sine(const FourierSeries& z) {
    return testutil::max_abs_diff([&](double t) { return z(t); }, [](double t) { return -std::sin(t); });
}

}  // namespace

TEST_CASE("planar monodromy spectrum") {
    const VectorField f = planar_normal_form();
    const MonodromyResult mr = monodromy(f, planar_cycle(), 0.0);
    REQUIRE(mr.spectrum.size() == 2);
    CHECK(std::abs(mr.spectrum[0] - 1.0) < 1e-6);
    CHECK(std::abs(mr.spectrum[1] - std::exp(-4.0 * std::numbers::pi)) < 1e-6);
    // Liouville
    CHECK(mr.M.determinant() == doctest::Approx(std::exp(mr.trace_integral)).epsilon(1e-5));
}

TEST_CASE("planar prc is minus sine by both methods") {
    const VectorField f = planar_normal_form();
    PrcOptions o;
    o.phases = 256;
    o.order = 32;
    const PhaseModel proj = prc_projection(f, planar_cycle(), o);
    CHECK(sup_vs_minus_sine(proj.Z) < 2e-3);
    const AdjointReport adj = prc_adjoint_report(f, planar_cycle(), o);
    CHECK(sup_vs_minus_sine(adj.model.Z) < 2e-3);
    CHECK(adj.closure < 1e-6);
}

TEST_CASE("singular normalization and degenerate spectra are reported") {
    // a linear rotation plus contraction has no unit multiplier
    VectorField f = planar_normal_form();
    LimitCycle lc = planar_cycle();
    f.rhs = [](const double* s, double u, double* ds) {
        ds[0] = -0.5 * s[0] - s[1] + u;
        ds[1] = -0.5 * s[1] + s[0];
    };
    f.jacobian = nullptr;
    CHECK_THROWS_AS(monodromy(f, lc, 0.0), Error);
}

TEST_CASE("hh monodromy and projection normalization") {
    const VectorField f = hh_field({});
    const LimitCycle& lc = hh_cycle();
    const MonodromyResult a = monodromy(f, lc, 0.0);
    bool has_unit = false;
    for (const auto& z : a.spectrum) has_unit |= std::abs(z - 1.0) < 1e-4;
    CHECK(has_unit);
    for (const auto& z : a.spectrum) CHECK(std::abs(z) < 1.0 + 1e-4);

    const MonodromyResult b = monodromy(f, lc, 2.0);
    for (std::size_t i = 0; i < a.spectrum.size(); ++i) CHECK(std::abs(a.spectrum[i] - b.spectrum[i]) < 1e-5);
    CHECK(a.M.determinant() == doctest::Approx(std::exp(a.trace_integral)).epsilon(1e-5));

    for (double theta : {0.0, 1.0, 3.0, 5.5}) {
        const ProjectionSample ps = projection_sample(f, lc, theta);
        CHECK(ps.m_dot_f == doctest::Approx(lc.omega).epsilon(1e-8));
    }
}
