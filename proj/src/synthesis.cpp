#include "entrain/synthesis.hpp"

#include <cmath>

#include "entrain/error.hpp"

namespace entrain {

namespace {
constexpr double kTiny = 1e-14;
constexpr double kFastDefaultFactor = 1.2;

void check_model(const PhaseModel& pm) {
    if (!(pm.omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "phase model frequency must be positive");
}

void check_target(double target) {
    if (!(target > 0.0) || !std::isfinite(target)) {
        throw Error(ErrorKind::InvalidArgument, "target frequency must be positive");
    }
}
}  // namespace

std::string_view to_string(Family f) {
    switch (f) {
        case Family::MinEnergy: return "min-energy";
        case Family::Fast: return "fast";
        case Family::Ensemble: return "ensemble";
        case Family::MaxRange: return "max-range";
        case Family::Custom: return "custom";
    }
    return "custom";
}

Family family_from_string(std::string_view s) {
    if (s == "min-energy" || s == "min") return Family::MinEnergy;
    if (s == "fast") return Family::Fast;
    if (s == "ensemble") return Family::Ensemble;
    if (s == "max-range" || s == "range") return Family::MaxRange;
    if (s == "custom") return Family::Custom;
    throw Error(ErrorKind::InvalidArgument, "unknown waveform family '" + std::string(s) + "'");
}

std::string_view to_string(EnsembleCase c) {
    switch (c) {
        case EnsembleCase::IMinus: return "I-minus";
        case EnsembleCase::IPlus: return "I-plus";
        case EnsembleCase::II: return "II";
    }
    return "II";
}

double Waveform::rms() const { return std::sqrt(energy); }

FourierSeries Waveform::unit_shape() const {
    if (!(energy > 0.0)) throw Error(ErrorKind::InvalidArgument, "zero waveform has no unit-energy shape");
    return v.scaled(1.0 / std::sqrt(energy));
}

Waveform make_waveform(FourierSeries v, const SubharmonicRatio& r, double target, Family family) {
    Waveform w;
    w.energy = entrain::energy(v);
    w.v = std::move(v);
    w.ratio = r;
    w.target = target;
    w.omega_f = static_cast<double>(r.N()) / r.M() * target;
    w.family = family;
    return w;
}

Waveform min_energy_single(const PhaseModel& pm, const SubharmonicRatio& r, double target) {
    check_model(pm);
    check_target(target);
    const double dw = pm.omega - target;
    if (dw == 0.0) return make_waveform(FourierSeries{}, r, target, Family::MinEnergy);
    const StructureFunctions sf = structure_functions(pm.Z, r);
    if (sf.V0 < kTiny) {
        throw Error(ErrorKind::EntrainmentImpossible,
                    "V0 = " + num(sf.V0) + " vanishes for ratio " + r.str(), sf.V0);
    }
    return make_waveform(y_nm(pm.Z, r, 0.0).scaled(-dw / sf.V0), r, target, Family::MinEnergy);
}

double asymptotic_constant(const PhaseModel& pm, double target) {
    check_model(pm);
    const double a0 = pm.Z.a0();
    if (std::abs(a0) < kTiny) throw Error(ErrorKind::UndefinedLimit, "PRC has zero mean");
    return -2.0 * (pm.omega - target) / a0;
}

double fast_min_power(const PhaseModel& pm, const SubharmonicRatio& r, double target) {
    const double dw = pm.omega - target;
    const StructureFunctions sf = structure_functions(pm.Z, r);
    if (dw != 0.0 && sf.V0 < kTiny) {
        throw Error(ErrorKind::EntrainmentImpossible, "V0 vanishes for ratio " + r.str(), sf.V0);
    }
    return dw == 0.0 ? 0.0 : dw * dw / sf.V0;
}

FastSolution fast_waveform(const PhaseModel& pm, const SubharmonicRatio& r, double target,
                           std::optional<double> power) {
    check_model(pm);
    check_target(target);
    const double dw = pm.omega - target;
    const StructureFunctions sf = structure_functions(pm.Z, r);
    if (sf.V0 < kTiny || sf.S0 < kTiny) {
        throw Error(ErrorKind::EntrainmentImpossible, "structure functions vanish for ratio " + r.str());
    }
    const double pmin = dw * dw / sf.V0;
    double P = 0.0;
    if (power) {
        P = *power;
    } else {
        if (pmin == 0.0) {
            throw Error(ErrorKind::InvalidArgument, "an explicit power is required at zero detuning");
        }
        P = kFastDefaultFactor * pmin;
    }
    if (!(P > pmin)) {
        throw Error(ErrorKind::InfeasibleEnergy,
                    "power " + num(P) + " must exceed the minimum " + num(pmin), pmin);
    }
    FastSolution sol;
    sol.min_power = pmin;
    sol.lambda = -0.5 * std::sqrt(sf.S0 / (P - pmin));
    const FourierSeries v =
        y_nm_phi(pm.Z, r, 0.0).scaled(1.0 / (2.0 * sol.lambda)) + y_nm(pm.Z, r, 0.0).scaled(-dw / sf.V0);
    sol.waveform = make_waveform(v, r, target, Family::Fast);
    sol.predicted_rate = sf.S0 / (2.0 * sol.lambda);
    return sol;
}

EnsembleSpec::EnsembleSpec(double w1, double w2, double t) : omega1(w1), omega2(w2), target(t) {
    if (!(w1 <= w2)) throw Error(ErrorKind::InvalidArgument, "ensemble requires omega1 <= omega2");
    check_target(t);
}

EnsembleSolution ensemble_waveform(const PhaseModel& pm, const SubharmonicRatio& r, const EnsembleSpec& spec) {
    check_model(pm);
    const StructureFunctions sf = structure_functions(pm.Z, r);
    if (sf.V0 < kTiny) throw Error(ErrorKind::EntrainmentImpossible, "V0 vanishes for ratio " + r.str(), sf.V0);
    const double d1 = spec.dw1(), d2 = spec.dw2();
    const double V0 = sf.V0, Vs = sf.V_star;

    EnsembleSolution sol;
    FourierSeries v;
    // Ties go to the single-constraint solution.
    if (d2 <= d1 * Vs / V0) {
        sol.case_label = EnsembleCase::IPlus;
        sol.mu_plus = 2.0 * d1 / V0;
        v = y_nm(pm.Z, r, 0.0).scaled(-d1 / V0);
    } else if (d1 >= d2 * Vs / V0) {
        sol.case_label = EnsembleCase::IMinus;
        sol.mu_minus = -2.0 * d2 / V0;
        v = y_nm(pm.Z, r, 0.0).scaled(-d2 / V0);
    } else {
        const double D = (V0 - Vs) * (V0 + Vs);
        if (!(std::abs(D) > kTiny * V0 * V0)) {
            throw Error(ErrorKind::EntrainmentImpossible, "flat V cannot lock two distinct frequencies");
        }
        sol.case_label = EnsembleCase::II;
        const double c1 = (d2 * Vs - d1 * V0) / D;
        const double c2 = (d1 * Vs - d2 * V0) / D;
        sol.mu_plus = -2.0 * c1;
        sol.mu_minus = 2.0 * c2;
        v = y_nm(pm.Z, r, sf.phi_star).scaled(c1) + y_nm(pm.Z, r, 0.0).scaled(c2);
    }
    sol.waveform = make_waveform(v, r, spec.target, Family::Ensemble);
    if (sol.waveform.energy > 0.0) {
        const InteractionFn fn = interaction(pm.Z, sol.waveform.v, r);
        sol.omega_minus = spec.target - fn.lambda_max;
        sol.omega_plus = spec.target - fn.lambda_min;
    } else {
        sol.omega_minus = sol.omega_plus = spec.target;
    }
    return sol;
}

RangeSolution max_range_waveform(const PhaseModel& pm, const SubharmonicRatio& r, double power,
                                 std::optional<double> target) {
    check_model(pm);
    if (!(power > 0.0)) throw Error(ErrorKind::InvalidArgument, "power must be positive");
    const double t = target.value_or(pm.omega);
    check_target(t);
    const StructureFunctions sf = structure_functions(pm.Z, r);
    const double gap = sf.V0 - sf.V_star;
    if (!(gap > kTiny * std::max(1.0, std::abs(sf.V0)))) {
        throw Error(ErrorKind::NoRangeGain, "V is flat for ratio " + r.str(), gap);
    }
    const double scale = std::sqrt(power / (2.0 * gap));
    RangeSolution sol;
    sol.waveform = make_waveform((y_nm(pm.Z, r, sf.phi_star) - y_nm(pm.Z, r, 0.0)).scaled(scale), r, t,
                                 Family::MaxRange);
    sol.width = std::sqrt(2.0 * power * gap);
    return sol;
}

}  // namespace entrain
