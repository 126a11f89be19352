#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "entrain/fourier.hpp"
#include "entrain/ode.hpp"

namespace entrain {

struct PhaseModel {
    double omega = 0.0;
    FourierSeries Z;
    double period = 0.0;
};

struct MonodromyResult {
    Eigen::MatrixXd M;
    // Unit eigenvector of M^T at multiplier 1 (adjoint direction).
    Eigen::VectorXd m0;
    std::vector<std::complex<double>> spectrum;
    // integral of trace A over the period, for Liouville checks
    double trace_integral = 0.0;
};

struct PrcOptions {
    int phases = 512;
    int order = 64;
    int jobs = 0;  // <= 0: hardware concurrency
};

MonodromyResult monodromy(const VectorField& field, const LimitCycle& cycle, double theta0);

// Per-phase output of the projection method.
struct ProjectionSample {
    double theta = 0.0;
    State m;                  // scaled so that m . f(x_theta) = omega
    double m_dot_f = 0.0;
    double Z = 0.0;
};

ProjectionSample projection_sample(const VectorField& field, const LimitCycle& cycle, double theta);

PhaseModel prc_projection(const VectorField& field, const LimitCycle& cycle, const PrcOptions& opts = {});

struct AdjointReport {
    PhaseModel model;
    int periods = 0;           // backward passes used
    double closure = 0.0;      // |m(T) - m(0)|_inf / |m(0)|_inf before renormalizing, final pass
};

AdjointReport prc_adjoint_report(const VectorField& field, const LimitCycle& cycle, const PrcOptions& opts = {});
PhaseModel prc_adjoint(const VectorField& field, const LimitCycle& cycle, const PrcOptions& opts = {});

}  // namespace entrain
