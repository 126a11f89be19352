#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "entrain/fourier.hpp"
#include "entrain/interaction.hpp"
#include "entrain/phase_reduce.hpp"

namespace entrain {

enum class TongueCase { A, B, C };
enum class AxisKind { ForcingFrequency, NaturalFrequency };

std::string_view to_string(TongueCase c);
std::string_view to_string(AxisKind a);

struct TonguePoint {
    double abscissa = 0.0;
    std::optional<double> p_left;
    std::optional<double> p_right;
};

struct TongueBoundary {
    AxisKind axis = AxisKind::ForcingFrequency;
    TongueCase case_label = TongueCase::B;
    SubharmonicRatio ratio{1, 1};
    double lambda_plus = 0.0;   // unit-shape Lambda at phi+
    double lambda_minus = 0.0;  // unit-shape Lambda at phi-
    std::vector<TonguePoint> points;
};

// Case A: 0 < Lambda(phi-), Case C: Lambda(phi+) < 0, otherwise B.
TongueCase classify(double lambda_minus, double lambda_plus);

// `count` points spanning center * (1 -/+ span).
std::vector<double> frequency_grid(double center, int count = 101, double span = 0.1);

// Abscissa is the forcing frequency; dw = omega - (M/N) Omega_f.
// p_left = -dw / Lambda(phi-), p_right = -dw / Lambda(phi+), negative values absent.
TongueBoundary single_tongue(const PhaseModel& pm, const SubharmonicRatio& r, const FourierSeries& unit_shape,
                             const std::vector<double>& forcing_grid);

// Abscissa is the natural frequency at fixed target Omega.
// right = (Omega - w) / Lambda(phi-), left = (Omega - w) / Lambda(phi+).
TongueBoundary ensemble_tongue(const PhaseModel& pm, const SubharmonicRatio& r, const FourierSeries& unit_shape,
                               double target, const std::vector<double>& natural_grid);

}  // namespace entrain
