#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "entrain/fourier.hpp"

namespace entrain {

// N forcing cycles per M oscillator cycles; N and M coprime.
class SubharmonicRatio {
public:
    SubharmonicRatio(int N, int M);
    // "N:M"
    static SubharmonicRatio parse(std::string_view text);

    [[nodiscard]] int N() const noexcept { return N_; }
    [[nodiscard]] int M() const noexcept { return M_; }
    [[nodiscard]] std::string str() const;

    friend bool operator==(const SubharmonicRatio&, const SubharmonicRatio&) = default;

private:
    int N_;
    int M_;
};

// Y(eta, phi) = (1/N) sum_j Z(M/N (2 pi j + eta) + phi), as a series in eta.
FourierSeries y_nm(const FourierSeries& Z, const SubharmonicRatio& r, double phi);
// d/dphi of the above.
FourierSeries y_nm_phi(const FourierSeries& Z, const SubharmonicRatio& r, double phi);

struct StructureFunctions {
    FourierSeries Q, V, K, S;
    double V0 = 0.0;
    double V_star = 0.0;
    double phi_star = 0.0;  // argmin of V
    double S0 = 0.0;
    double S_star = 0.0;
};

FourierSeries autocorrelation(const FourierSeries& Z);  // Q
// Keeps harmonics that are multiples of N, i.e. (1/N) sum_j Q(2 pi M j / N + phi).
FourierSeries subharmonic_average(const FourierSeries& Q, const SubharmonicRatio& r);

StructureFunctions structure_functions(const FourierSeries& Z, const SubharmonicRatio& r);

struct InteractionFn {
    FourierSeries lambda;
    double phi_plus = 0.0;
    double phi_minus = 0.0;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    SubharmonicRatio ratio{1, 1};
};

// Lambda(phi) = < Z(M theta + phi) v(N theta) > in closed form.
InteractionFn interaction(const FourierSeries& Z, const FourierSeries& v, const SubharmonicRatio& r);

// Trapezoid quadrature of the defining average at each phi.
std::vector<double> interaction_quadrature(const FourierSeries& Z, const FourierSeries& v,
                                           const SubharmonicRatio& r, const std::vector<double>& phis,
                                           int grid = 8192);

bool entrainment_exists(const FourierSeries& Z, const FourierSeries& v, const SubharmonicRatio& r);

struct FixedPoints {
    std::vector<double> stable;
    std::vector<double> unstable;
};

// Roots of dw + Lambda(phi) on [0, 2 pi).
FixedPoints fixed_points(const InteractionFn& fn, double dw);

}  // namespace entrain
