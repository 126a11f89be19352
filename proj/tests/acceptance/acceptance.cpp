// One PASS/FAIL line per acceptance criterion. Usage: acceptance [id ...]
// with ids 1..10 and "state"; no arguments runs everything.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <numeric>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "entrain/arnold.hpp"
#include "entrain/error.hpp"
#include "entrain/interaction.hpp"
#include "entrain/ode.hpp"
#include "entrain/phase_reduce.hpp"
#include "entrain/sim.hpp"
#include "entrain/synthesis.hpp"

using namespace entrain;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Tolerances and budgets.
constexpr double kPaperPeriod = 14.63842;
constexpr double kPeriodTol = 1e-4;
constexpr double kPrcCrossTol = 1e-3;   // relative to max|Z|
constexpr double kPlanarPrcTol = 2e-3;
constexpr double kQuadratureTol = 1e-8;
constexpr double kSelfTol = 1e-10;
constexpr double kConstraintTol = 1e-10;
constexpr double kEnergyTol = 1e-12;
constexpr double kRepeatTol = 1e-10;
constexpr double kLimitTol = 0.05;
constexpr double kFastTol = 1e-10;
constexpr double kTongueTol = 0.01;
constexpr double kEnsembleTol = 1e-8;
constexpr double kEnsembleEnergyTol = 1e-10;
constexpr double kKappa1Tol = 0.10;
constexpr double kKappa2Tol = 0.25;
constexpr double kFig8Slope = -0.0256;
constexpr double kLemmaTol = 1e-12;
constexpr double kSpotTol = 0.05;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string id;
    std::string title;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt2(const char* f, double a, double b) {
    char buf[192];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

const LimitCycle& hh_cycle() {
    static const LimitCycle lc = find_limit_cycle(hh_field({}), {-65.0, 0.05, 0.6, 0.32});
    return lc;
}

const PhaseModel& hh_model() {
    static const PhaseModel pm = prc_projection(hh_field({}), hh_cycle());
    return pm;
}

// Plain trigonometric evaluation, independent of the library's evaluator.
double eval_direct(const FourierSeries& f, double t) {
    double s = 0.5 * f.a0();
    for (int n = 1; n <= f.order(); ++n) s += f.a(n) * std::cos(n * t) + f.b(n) * std::sin(n * t);
    return s;
}

double lambda_quadrature(const FourierSeries& Z, const FourierSeries& v, int N, int M, double phi) {
    constexpr int grid = 8192;
    double s = 0.0;
    for (int k = 0; k < grid; ++k) {
        const double t = kTwoPi * k / grid;
        s += eval_direct(Z, M * t + phi) * eval_direct(v, N * t);
    }
    return s / grid;
}

double sup_diff(const std::function<double(double)>& f, const std::function<double(double)>& g, int points = 4096) {
    double d = 0.0;
    for (int k = 0; k < points; ++k) {
        const double t = kTwoPi * k / points;
        d = std::max(d, std::abs(f(t) - g(t)));
    }
    return d;
}

FourierSeries random_series(std::mt19937_64& rng, int order) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> a(order), b(order);
    for (int i = 0; i < order; ++i) {
        const double decay = 1.0 / (1.0 + i);
        a[i] = n(rng) * decay;
        b[i] = n(rng) * decay;
    }
    return FourierSeries(n(rng), a, b);
}

std::vector<SubharmonicRatio> coprime_ratios() {
    std::vector<SubharmonicRatio> out;
    for (int N = 1; N <= 5; ++N)
        for (int M = 1; M <= 5; ++M)
            if (std::gcd(N, M) == 1) out.emplace_back(N, M);
    return out;
}

// ---- criteria ----

Outcome c1() {
    const double T = hh_cycle().period;
    const double err = std::abs(T - kPaperPeriod);
    return {err <= kPeriodTol, fmt2("T = %.8f ms, |T - 14.63842| = %.2e", T, err)};
}

Outcome c2() {
    const VectorField f = hh_field({});
    const PhaseModel adj = prc_adjoint(f, hh_cycle());
    const PhaseModel& proj = hh_model();
    double peak = 0.0;
    for (double z : proj.Z.sample(4096)) peak = std::max(peak, std::abs(z));
    const double dev = sup_diff([&](double t) { return proj.Z(t); }, [&](double t) { return adj.Z(t); }) / peak;

    LimitCycleOptions o;
    o.resolution = 1024;
    const VectorField planar = planar_normal_form();
    const LimitCycle pc = find_limit_cycle(planar, {0.5, 0.0}, o);
    PrcOptions po;
    po.phases = 256;
    po.order = 32;
    const PhaseModel pp = prc_projection(planar, pc, po);
    const double pd = sup_diff([&](double t) { return pp.Z(t); }, [](double t) { return -std::sin(t); });
    return {dev <= kPrcCrossTol && pd <= kPlanarPrcTol,
            fmt2("HH projection vs adjoint %.2e of max|Z|; planar vs -sin %.2e", dev, pd)};
}

Outcome c3() {
    std::mt19937_64 rng(2024);
    const auto ratios = coprime_ratios();
    std::uniform_int_distribution<int> pick(0, static_cast<int>(ratios.size()) - 1), ord(1, 16);
    std::uniform_real_distribution<double> ph(0.0, kTwoPi);
    double worst = 0.0, worst_self = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto& r = ratios[pick(rng)];
        const FourierSeries Z = random_series(rng, ord(rng) * r.N());
        const FourierSeries v = random_series(rng, ord(rng) * r.M());
        const InteractionFn fn = interaction(Z, v, r);
        for (int k = 0; k < 16; ++k) {
            const double phi = kTwoPi * k / 16 + 0.01 * trial;
            worst = std::max(worst, std::abs(fn.lambda(phi) - lambda_quadrature(Z, v, r.N(), r.M(), phi)));
        }
        const double psi = ph(rng);
        const InteractionFn self = interaction(Z, y_nm(Z, r, psi), r);
        const StructureFunctions sf = structure_functions(Z, r);
        worst_self = std::max(worst_self,
                              sup_diff([&](double t) { return self.lambda(t); }, [&](double t) { return sf.V(t - psi); }, 512));
    }
    return {worst <= kQuadratureTol && worst_self <= kSelfTol,
            fmt2("closed form vs quadrature %.2e; self-interaction %.2e", worst, worst_self)};
}

Outcome c4() {
    const PhaseModel& pm = hh_model();
    const double target = 1.03 * pm.omega;
    const double dw = pm.omega - target;
    double worst_c = 0.0, worst_e = 0.0, worst_rep = 0.0;
    const Waveform w11 = min_energy_single(pm, {1, 1}, target);
    for (const auto& r : coprime_ratios()) {
        const Waveform w = min_energy_single(pm, r, target);
        const InteractionFn fn = interaction(pm.Z, w.v, r);
        const StructureFunctions sf = structure_functions(pm.Z, r);
        worst_c = std::max(worst_c, std::abs(fn.lambda_max + dw));
        worst_e = std::max(worst_e, std::abs(w.energy - dw * dw / sf.V0));
        if (r.N() == 1) {
            const int M = r.M();
            worst_rep = std::max(worst_rep, sup_diff([&](double t) { return w.v(t); },
                                                     [&](double t) { return w11.v(M * t); }));
        }
    }
    return {worst_c <= kConstraintTol && worst_e <= kEnergyTol && worst_rep <= kRepeatTol,
            fmt2("|Lambda(phi+) + dw| <= %.2e, energy error <= %.2e", worst_c, worst_e) +
                fmt(", 1:M repetition <= %.2e", worst_rep)};
}

Outcome c5() {
    const PhaseModel& pm = hh_model();
    const double target = 1.03 * pm.omega;
    const Waveform w = min_energy_single(pm, {5, 1}, target);
    const double ups = asymptotic_constant(pm, target);
    const double d = sup_diff([&](double t) { return w.v(t); }, [&](double) { return ups; });
    const double rel = d / std::abs(ups);
    return {rel <= kLimitTol, fmt2("sup|v_m - Upsilon| / |Upsilon| = %.4f (Upsilon = %.4e)", rel, ups)};
}

Outcome c6() {
    const PhaseModel& pm = hh_model();
    double worst = 0.0;
    for (const SubharmonicRatio r : {SubharmonicRatio{1, 1}, SubharmonicRatio{2, 1}, SubharmonicRatio{3, 2}}) {
        for (double rel : {0.99, 1.0, 1.01}) {
            const double target = rel * pm.omega;
            const double dw = pm.omega - target;
            const StructureFunctions sf = structure_functions(pm.Z, r);
            const double P = dw == 0.0 ? 1e-3 : 1.2 * dw * dw / sf.V0;
            const FastSolution s = fast_waveform(pm, r, target, P);
            const InteractionFn fn = interaction(pm.Z, s.waveform.v, r);
            const double slope = fn.lambda.derivative()(0.0);
            worst = std::max({worst, std::abs(s.waveform.energy - P), std::abs(fn.lambda(0.0) + dw),
                              std::abs(slope + std::sqrt(sf.S0 * (P - dw * dw / sf.V0)))});
        }
    }
    return {worst <= kFastTol, fmt("largest contract residual %.2e", worst)};
}

Outcome c7() {
    const PhaseModel& pm = hh_model();
    double worst = 0.0;
    int points = 0, failures = 0;
    std::string where;
    for (const SubharmonicRatio r : {SubharmonicRatio{1, 1}, SubharmonicRatio{2, 1}}) {
        const FourierSeries shape = min_energy_single(pm, r, 0.99 * pm.omega).unit_shape();
        const double c = static_cast<double>(r.N()) / r.M() * pm.omega;
        std::vector<double> grid;
        for (double off : {-0.02, -0.015, -0.01, -0.005, 0.005, 0.01, 0.015, 0.02}) grid.push_back(c * (1 + off));
        const TongueBoundary theory = single_tongue(pm, r, shape, grid);
        std::vector<BoundaryJob> jobs;
        std::vector<double> est;
        for (const auto& pt : theory.points) {
            const bool left = pt.p_left && (!pt.p_right || *pt.p_left <= *pt.p_right);
            const double p = left ? *pt.p_left : *pt.p_right;
            jobs.push_back({pt.abscissa, left ? Side::Left : Side::Right, p,
                            phase_lock_test(pm, shape, r, pt.abscissa, p)});
            est.push_back(p);
        }
        const SweepResult res = tongue_sweep(jobs, AxisKind::ForcingFrequency, r);
        failures += res.failures;
        for (std::size_t i = 0; i < res.boundary.points.size(); ++i) {
            const auto& pt = res.boundary.points[i];
            const auto& got = jobs[i].side == Side::Left ? pt.p_left : pt.p_right;
            if (!got) continue;
            const double dev = std::abs(*got - est[i]) / est[i];
            if (dev > worst) {
                worst = dev;
                where = " at " + r.str() + fmt(", offset %+.3f", pt.abscissa / c - 1.0);
            }
            ++points;
        }
    }
    return {failures == 0 && worst <= kTongueTol,
            fmt2("%g points, max relative deviation from theory %.4f", points, worst) + where +
                (failures ? fmt(", %g failed", failures) : "")};
}

Outcome c8() {
    const PhaseModel& pm = hh_model();
    const SubharmonicRatio r{1, 1};
    const EnsembleSpec spec(0.95 * pm.omega, 1.05 * pm.omega, pm.omega);
    const EnsembleSolution s = ensemble_waveform(pm, r, spec);
    const InteractionFn fn = interaction(pm.Z, s.waveform.v, r);
    const StructureFunctions sf = structure_functions(pm.Z, r);
    const double d1 = spec.dw1(), d2 = spec.dw2();
    const double e1 = std::abs(fn.lambda_max + d1), e2 = std::abs(fn.lambda_min + d2);
    const double D = (sf.V0 - sf.V_star) * (sf.V0 + sf.V_star);
    const double energy = ((d1 * d1 + d2 * d2) * sf.V0 - 2 * d1 * d2 * sf.V_star) / D;
    const double ee = std::abs(s.waveform.energy - energy);
    const RangeSolution rs = max_range_waveform(pm, r, s.waveform.energy);
    // smallest sup-norm difference over circular shifts of a 4096 grid
    const int G = 4096;
    const std::vector<double> a = s.waveform.v.sample(G), b = rs.waveform.v.sample(G);
    double best = 1e300;
    for (int shift = 0; shift < G; ++shift) {
        double d = 0.0;
        for (int k = 0; k < G && d < best; ++k) d = std::max(d, std::abs(a[k] - b[(k + shift) % G]));
        best = std::min(best, d);
    }
    const bool ok = s.case_label == EnsembleCase::II && e1 <= kEnsembleTol && e2 <= kEnsembleTol &&
                    ee <= kEnsembleEnergyTol && best <= kEnsembleTol;
    return {ok, std::string("case ") + std::string(to_string(s.case_label)) +
                    fmt2(", constraint residuals %.2e / %.2e", e1, e2) + fmt(", energy error %.2e", ee) +
                    fmt(", max-range difference %.2e", best)};
}

Outcome c9() {
    const PhaseModel& pm = hh_model();
    const SubharmonicRatio r{1, 1};
    const double target = 1.01 * pm.omega;
    const double dw = pm.omega - target;
    const StructureFunctions sf = structure_functions(pm.Z, r);
    // energy at which the designed slope equals the published theoretical rate
    const double P = dw * dw / sf.V0 + kFig8Slope * kFig8Slope / sf.S0;
    const FastSolution s = fast_waveform(pm, r, target, P);
    const double theory = interaction(pm.Z, s.waveform.v, r).lambda.derivative()(0.0);

    const std::vector<double> psi = integrate_phase(pm, s.waveform, -0.4, 400);
    const EntrainmentVerdict v = detect_entrainment_phase(psi, target);
    if (!v.locked) return {false, "phase model did not lock"};
    const RateEstimate k1 = rate_phase(psi, target, v.series.back());

    const VectorField f = hh_field({});
    const auto peaks = forced_peak_times(f, hh_cycle(), s.waveform, -0.4, 80 * kTwoPi / target);
    const RateEstimate k2 = rate_state(peaks, target);
    const double r1 = std::abs(k1.kappa - theory) / std::abs(theory);
    const double r2 = std::abs(k2.kappa - theory) / std::abs(theory);
    return {r1 <= kKappa1Tol && r2 <= kKappa2Tol,
            fmt("theory %.5f", theory) + fmt2(", kappa1 %.5f (%.3f off)", k1.kappa, r1) +
                fmt2(", kappa2 %.5f (%.3f off)", k2.kappa, r2)};
}

Outcome c10() {
    std::mt19937_64 rng(10);
    int wrong = 0, cases = 0;
    for (int N = 2; N <= 5; ++N)
        for (int M = 1; M <= 5; ++M) {
            if (std::gcd(N, M) != 1) continue;
            for (int trial = 0; trial < 3; ++trial) {
                ++cases;
                if (entrainment_exists(FourierSeries::sine(1), random_series(rng, 12), {N, M})) ++wrong;
                ++cases;
                if (entrainment_exists(random_series(rng, 12), FourierSeries::sine(1), {M, N})) ++wrong;
            }
        }
    const InteractionFn fn = interaction(FourierSeries::cosine(2), FourierSeries::cosine(1), {2, 1});
    const double closed = sup_diff([&](double t) { return fn.lambda(t); }, [](double t) { return 0.5 * std::cos(2 * t); });
    double quad = 0.0;
    for (double phi : {0.0, 0.4, 1.3, 2.2, 3.9, 5.5}) {
        quad = std::max(quad, std::abs(lambda_quadrature(FourierSeries::cosine(2), FourierSeries::cosine(1), 2, 1, phi) -
                                       0.5 * std::cos(2 * phi)));
    }
    const bool possible = entrainment_exists(FourierSeries::cosine(2), FourierSeries::cosine(1), {2, 1});
    return {wrong == 0 && possible && closed <= kLemmaTol && quad <= kLemmaTol,
            fmt2("%g/%g impossibility cases correct", cases - wrong, cases) +
                fmt2(", cos2/cos 2:1 closed-form error %.2e, quadrature error %.2e", closed, quad)};
}

Outcome c_state() {
    const PhaseModel& pm = hh_model();
    const VectorField f = hh_field({});
    const SubharmonicRatio r{1, 1};
    const FourierSeries shape = min_energy_single(pm, r, 0.99 * pm.omega).unit_shape();
    const std::vector<double> grid{0.99 * pm.omega, 1.01 * pm.omega, 1.02 * pm.omega};
    const TongueBoundary theory = single_tongue(pm, r, shape, grid);
    std::vector<BoundaryJob> phase_jobs, state_jobs;
    for (const auto& pt : theory.points) {
        const bool left = pt.p_left.has_value();
        const double p = left ? *pt.p_left : *pt.p_right;
        const Side side = left ? Side::Left : Side::Right;
        phase_jobs.push_back({pt.abscissa, side, p, phase_lock_test(pm, shape, r, pt.abscissa, p)});
        state_jobs.push_back({pt.abscissa, side, p, state_lock_test(f, hh_cycle(), pm, shape, r, pt.abscissa, p)});
    }
    const SweepResult ph = tongue_sweep(phase_jobs, AxisKind::ForcingFrequency, r);
    const SweepResult st = tongue_sweep(state_jobs, AxisKind::ForcingFrequency, r);
    double worst = 0.0;
    std::string values;
    bool complete = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& a = phase_jobs[i].side == Side::Left ? ph.boundary.points[i].p_left : ph.boundary.points[i].p_right;
        const auto& b = state_jobs[i].side == Side::Left ? st.boundary.points[i].p_left : st.boundary.points[i].p_right;
        if (!a || !b) {
            complete = false;
            continue;
        }
        worst = std::max(worst, std::abs(*b - *a) / *a);
        values += fmt2(" [%.5f vs %.5f]", *b, *a);
    }
    return {complete && worst <= kSpotTol, fmt("max state/phase boundary deviation %.4f;", worst) + values};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {"1", "HH period", 30, c1},
        {"2", "PRC cross-validation", 120, c2},
        {"3", "interaction oracle", 60, c3},
        {"4", "min-energy construction", 60, c4},
        {"5", "large-N limit", 10, c5},
        {"6", "fast-waveform contracts", 10, c6},
        {"7", "phase-model Arnold tongue", 600, c7},
        {"8", "ensemble solution", 60, c8},
        {"9", "entrainment rate", 600, c9},
        {"10", "Lemma-1 suite", 10, c10},
        {"state", "state-space spot check", 1800, c_state},
    };
    std::vector<std::string> wanted(argv + 1, argv + argc);
    int failed = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
        // The HH cycle is timed by criterion 1 and the projection PRC by
        // criterion 2; later criteria reuse them.
        if (c.id == "2") (void)hh_cycle();
        else if (c.id != "1" && c.id != "3" && c.id != "10") (void)hh_model();
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s criterion %s (%s): %s; %.1f s of %.0f s%s\n", pass ? "PASS" : "FAIL", c.id.c_str(),
                    c.title.c_str(), o.detail.c_str(), secs, c.budget_s, in_time ? "" : " (over budget)");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
