#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "entrain/fourier.hpp"
#include "entrain/interaction.hpp"
#include "entrain/phase_reduce.hpp"

namespace entrain {

enum class Family { MinEnergy, Fast, Ensemble, MaxRange, Custom };

std::string_view to_string(Family f);
Family family_from_string(std::string_view s);

struct Waveform {
    FourierSeries v;         // in the forcing phase eta
    double omega_f = 0.0;    // forcing frequency (N/M) * target
    double target = 0.0;     // Omega
    SubharmonicRatio ratio{1, 1};
    double energy = 0.0;     // <v^2>
    Family family = Family::Custom;

    [[nodiscard]] double rms() const;
    // Same shape scaled to unit energy.
    [[nodiscard]] FourierSeries unit_shape() const;
};

Waveform make_waveform(FourierSeries v, const SubharmonicRatio& r, double target, Family family);

// -(dw / V0) Y(eta, 0), dw = omega - target.
Waveform min_energy_single(const PhaseModel& pm, const SubharmonicRatio& r, double target);

// Large-N limit -2 dw / a0 of the min-energy waveform.
double asymptotic_constant(const PhaseModel& pm, double target);

struct FastSolution {
    Waveform waveform;
    double lambda = 0.0;          // multiplier
    double predicted_rate = 0.0;  // dLambda/dphi at the lock phase
    double min_power = 0.0;       // dw^2 / V0
};

double fast_min_power(const PhaseModel& pm, const SubharmonicRatio& r, double target);
// power defaults to 1.2 times the minimum feasible energy.
FastSolution fast_waveform(const PhaseModel& pm, const SubharmonicRatio& r, double target,
                           std::optional<double> power = std::nullopt);

struct EnsembleSpec {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double target = 0.0;

    EnsembleSpec(double w1, double w2, double t);
    [[nodiscard]] double dw1() const { return omega1 - target; }
    [[nodiscard]] double dw2() const { return omega2 - target; }
};

enum class EnsembleCase { IMinus, IPlus, II };
std::string_view to_string(EnsembleCase c);

struct EnsembleSolution {
    Waveform waveform;
    EnsembleCase case_label = EnsembleCase::II;
    double mu_plus = 0.0;
    double mu_minus = 0.0;
    double omega_minus = 0.0;  // predicted locking range
    double omega_plus = 0.0;
};

EnsembleSolution ensemble_waveform(const PhaseModel& pm, const SubharmonicRatio& r, const EnsembleSpec& spec);

struct RangeSolution {
    Waveform waveform;
    double width = 0.0;  // Lambda_max - Lambda_min
};

RangeSolution max_range_waveform(const PhaseModel& pm, const SubharmonicRatio& r, double power,
                                 std::optional<double> target = std::nullopt);

}  // namespace entrain
