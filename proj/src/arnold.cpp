#include "entrain/arnold.hpp"

#include <cmath>

#include "entrain/error.hpp"

namespace entrain {

namespace {

InteractionFn checked_interaction(const PhaseModel& pm, const SubharmonicRatio& r, const FourierSeries& shape) {
    const double e = energy(shape);
    if (std::abs(e - 1.0) > 1e-10) {
        throw Error(ErrorKind::InvalidArgument, "waveform shape must have unit energy, got " + num(e), e);
    }
    InteractionFn fn = interaction(pm.Z, shape, r);
    if (std::abs(fn.lambda_max) < 1e-14 && std::abs(fn.lambda_min) < 1e-14) {
        throw Error(ErrorKind::NoTongue, "interaction function vanishes for ratio " + r.str());
    }
    return fn;
}

std::optional<double> boundary_power(double dw, double lambda) {
    const double p = -dw / lambda;
    if (!std::isfinite(p) || p < 0.0) return std::nullopt;
    return p == 0.0 ? 0.0 : p;  // no negative zero in output
}

}  // namespace

std::string_view to_string(TongueCase c) {
    switch (c) {
        case TongueCase::A: return "A";
        case TongueCase::B: return "B";
        case TongueCase::C: return "C";
    }
    return "B";
}

std::string_view to_string(AxisKind a) {
    return a == AxisKind::ForcingFrequency ? "forcing-frequency" : "natural-frequency";
}

TongueCase classify(double lambda_minus, double lambda_plus) {
    if (lambda_minus > 0.0) return TongueCase::A;
    if (lambda_plus < 0.0) return TongueCase::C;
    return TongueCase::B;
}

std::vector<double> frequency_grid(double center, int count, double span) {
    std::vector<double> g;
    if (count <= 0) return g;
    if (count == 1) return {center};
    g.reserve(count);
    for (int i = 0; i < count; ++i) g.push_back(center * (1.0 - span + 2.0 * span * i / (count - 1)));
    return g;
}

TongueBoundary single_tongue(const PhaseModel& pm, const SubharmonicRatio& r, const FourierSeries& unit_shape,
                             const std::vector<double>& forcing_grid) {
    const InteractionFn fn = checked_interaction(pm, r, unit_shape);
    TongueBoundary tb;
    tb.axis = AxisKind::ForcingFrequency;
    tb.ratio = r;
    tb.lambda_plus = fn.lambda_max;
    tb.lambda_minus = fn.lambda_min;
    tb.case_label = classify(fn.lambda_min, fn.lambda_max);
    const double mn = static_cast<double>(r.M()) / r.N();
    for (double of : forcing_grid) {
        const double dw = pm.omega - mn * of;
        tb.points.push_back({of, boundary_power(dw, fn.lambda_min), boundary_power(dw, fn.lambda_max)});
    }
    return tb;
}

TongueBoundary ensemble_tongue(const PhaseModel& pm, const SubharmonicRatio& r, const FourierSeries& unit_shape,
                               double target, const std::vector<double>& natural_grid) {
    const InteractionFn fn = checked_interaction(pm, r, unit_shape);
    TongueBoundary tb;
    tb.axis = AxisKind::NaturalFrequency;
    tb.ratio = r;
    tb.lambda_plus = fn.lambda_max;
    tb.lambda_minus = fn.lambda_min;
    tb.case_label = classify(fn.lambda_min, fn.lambda_max);
    for (double w : natural_grid) {
        const double dw = w - target;
        tb.points.push_back({w, boundary_power(dw, fn.lambda_max), boundary_power(dw, fn.lambda_min)});
    }
    return tb;
}

}  // namespace entrain
