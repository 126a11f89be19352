#include "entrain/phase_reduce.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "entrain/error.hpp"
#include "entrain/parallel.hpp"

namespace entrain {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long cycle_steps(const LimitCycle& cycle) {
    const int K = cycle.resolution();
    const long sub = std::max<long>(1, static_cast<long>(std::ceil(cycle.period / (K * cycle.dt))));
    return K * sub;
}

State start_state(const VectorField& field, const LimitCycle& cycle, double theta) {
    const int K = cycle.resolution();
    const double pos = wrap_phase(theta, kTwoPi) / kTwoPi * K;
    const double idx = std::round(pos);
    if (std::abs(pos - idx) < 1e-9) return cycle.samples[static_cast<int>(idx) % K];
    return cycle_state(field, cycle, theta);
}

// Eigenvector of mt at eigenvalue 1 by shifted inverse iteration.
Eigen::VectorXd unit_eigenvector(const Eigen::MatrixXd& mt, double theta) {
    const int n = static_cast<int>(mt.rows());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    for (double shift : {1.0, 1.0 + 1e-10, 1.0 - 1e-9}) {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(mt - shift * I);
        Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
        bool finite = true;
        for (int it = 0; it < 50; ++it) {
            Eigen::VectorXd y = lu.solve(x);
            if (!y.allFinite() || y.norm() == 0.0) {
                finite = false;
                break;
            }
            y.normalize();
            if (y.dot(x) < 0.0) y = -y;
            const double change = (y - x).lpNorm<Eigen::Infinity>();
            x = y;
            if (change < 1e-12) return x;
        }
        if (finite) {
            // A converged direction that still moves at the 1e-12 level due to
            // rounding is accepted if it is an eigenvector to high accuracy.
            const double residual = (mt * x - x).lpNorm<Eigen::Infinity>();
            if (residual < 1e-8 * std::max(1.0, mt.lpNorm<Eigen::Infinity>())) return x;
        }
    }
    throw Error(ErrorKind::EigenvectorNotConverged,
                "inverse iteration did not converge at theta = " + num(theta), theta);
}

}  // namespace

MonodromyResult monodromy(const VectorField& field, const LimitCycle& cycle, double theta0) {
    const int n = field.dimension;
    const long steps = cycle_steps(cycle);
    const double h = cycle.period / static_cast<double>(steps);

    State x = start_state(field, cycle, theta0);
    Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(n, n);

    Eigen::MatrixXd A1(n, n), A2(n, n), A3(n, n), A4(n, n);
    Eigen::MatrixXd P(n, n), K1(n, n), K2(n, n), K3(n, n), K4(n, n);
    State k1(n), k2(n), k3(n), k4(n), tmp(n);
    std::vector<double> jac(n * n);
    auto jac_at = [&](const double* s, Eigen::MatrixXd& A) {
        jacobian(field, s, jac.data());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = jac[i * n + j];
    };

    double trace_integral = 0.0;
    for (long s = 0; s < steps; ++s) {
        field.rhs(x.data(), 0.0, k1.data());
        jac_at(x.data(), A1);
        K1.noalias() = A1 * phi;

        for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        field.rhs(tmp.data(), 0.0, k2.data());
        jac_at(tmp.data(), A2);
        P = phi + 0.5 * h * K1;
        K2.noalias() = A2 * P;

        for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        field.rhs(tmp.data(), 0.0, k3.data());
        jac_at(tmp.data(), A3);
        P = phi + 0.5 * h * K2;
        K3.noalias() = A3 * P;

        for (int i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        field.rhs(tmp.data(), 0.0, k4.data());
        jac_at(tmp.data(), A4);
        P = phi + h * K3;
        K4.noalias() = A4 * P;

        for (int i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        phi += h / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
        trace_integral += h / 6.0 * (A1.trace() + 2.0 * A2.trace() + 2.0 * A3.trace() + A4.trace());
    }
    if (!phi.allFinite()) {
        throw Error(ErrorKind::IntegrationDiverged, "variational equation produced non-finite values");
    }

    MonodromyResult res;
    res.M = phi;
    res.trace_integral = trace_integral;
    Eigen::EigenSolver<Eigen::MatrixXd> es(phi, false);
    const auto ev = es.eigenvalues();
    double closest = 1e300;
    for (int i = 0; i < ev.size(); ++i) {
        res.spectrum.push_back(ev[i]);
        closest = std::min(closest, std::abs(ev[i] - std::complex<double>(1.0, 0.0)));
    }
    std::sort(res.spectrum.begin(), res.spectrum.end(),
              [](const auto& a, const auto& b) { return std::abs(a) > std::abs(b); });
    if (closest > 1e-3) {
        throw Error(ErrorKind::DegenerateMonodromy,
                    "no Floquet multiplier within 1e-3 of 1 (closest distance " + num(closest) + ")",
                    closest);
    }
    res.m0 = unit_eigenvector(phi.transpose(), theta0);
    return res;
}

ProjectionSample projection_sample(const VectorField& field, const LimitCycle& cycle, double theta) {
    const MonodromyResult mr = monodromy(field, cycle, theta);
    const State x = start_state(field, cycle, theta);
    const State f = field.eval(x);
    double mu_f = 0.0;
    double scale = 0.0;
    for (int i = 0; i < field.dimension; ++i) {
        mu_f += mr.m0[i] * f[i];
        scale += std::abs(mr.m0[i] * f[i]);
    }
    if (!(std::abs(mu_f) > 1e-12 * std::max(scale, 1e-300))) {
        throw Error(ErrorKind::SingularNormalization,
                    "adjoint eigenvector is orthogonal to the flow at theta = " + num(theta), theta);
    }
    ProjectionSample ps;
    ps.theta = theta;
    ps.m.resize(field.dimension);
    for (int i = 0; i < field.dimension; ++i) ps.m[i] = cycle.omega * mr.m0[i] / mu_f;
    const State b = input_direction(field, x);
    for (int i = 0; i < field.dimension; ++i) {
        ps.m_dot_f += ps.m[i] * f[i];
        ps.Z += ps.m[i] * b[i];
    }
    return ps;
}

PhaseModel prc_projection(const VectorField& field, const LimitCycle& cycle, const PrcOptions& opts) {
    if (opts.phases < 2 * opts.order + 1) {
        throw Error(ErrorKind::InsufficientResolution, "phase grid too small for the requested order");
    }
    std::vector<double> z(opts.phases);
    parallel_for(opts.phases, opts.jobs, [&](int k) {
        z[k] = projection_sample(field, cycle, kTwoPi * k / opts.phases).Z;
    });
    PhaseModel pm;
    pm.omega = cycle.omega;
    pm.period = cycle.period;
    pm.Z = fit(z, opts.order);
    return pm;
}

AdjointReport prc_adjoint_report(const VectorField& field, const LimitCycle& cycle, const PrcOptions& opts) {
    const int n = field.dimension;
    const int P = opts.phases;
    if (P < 2 * opts.order + 1) {
        throw Error(ErrorKind::InsufficientResolution, "phase grid too small for the requested order");
    }
    const long per = std::max<long>(1, static_cast<long>(std::ceil(cycle.period / (P * cycle.dt))));
    const long steps = P * per;
    const double h = cycle.period / static_cast<double>(steps);

    // Forward pass at half steps; node 2j is t = j h.
    std::vector<State> xs;
    xs.reserve(2 * steps + 1);
    State x = cycle.samples[0];
    xs.push_back(x);
    Rk4 rk(field);
    for (long s = 0; s < 2 * steps; ++s) {
        rk.step_autonomous(x.data(), 0.5 * h);
        xs.push_back(x);
    }
    std::vector<Eigen::MatrixXd> At(xs.size());
    std::vector<double> jac(n * n);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        jacobian(field, xs[i].data(), jac.data());
        Eigen::MatrixXd A(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) A(c, r) = jac[r * n + c];  // transposed
        At[i] = std::move(A);
    }

    const MonodromyResult mr = monodromy(field, cycle, 0.0);
    const State f0 = field.eval(cycle.samples[0]);
    auto normalize = [&](Eigen::VectorXd& m) {
        double mf = 0.0;
        for (int i = 0; i < n; ++i) mf += m[i] * f0[i];
        if (!(std::abs(mf) > 0.0) || !std::isfinite(mf)) {
            throw Error(ErrorKind::SingularNormalization, "adjoint solution orthogonal to the flow at theta = 0");
        }
        m *= cycle.omega / mf;
    };
    Eigen::VectorXd m0 = mr.m0;
    normalize(m0);
    const double initial_norm = m0.lpNorm<Eigen::Infinity>();

    std::vector<Eigen::VectorXd> nodes(P);
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n);
    AdjointReport report;
    constexpr int kMaxPeriods = 50;
    for (int pass = 1; pass <= kMaxPeriods; ++pass) {
        Eigen::VectorXd m = m0;
        for (long j = steps; j > 0; --j) {
            const long i = 2 * j;
            k1.noalias() = At[i] * m;
            k2.noalias() = At[i - 1] * (m + 0.5 * h * k1);
            k3.noalias() = At[i - 1] * (m + 0.5 * h * k2);
            k4.noalias() = At[i - 2] * (m + h * k3);
            m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if ((j - 1) % per == 0) nodes[(j - 1) / per] = m;
        }
        if (!m.allFinite() || m.lpNorm<Eigen::Infinity>() > 1e8 * initial_norm) {
            throw Error(ErrorKind::AdjointUnstable,
                        "adjoint integration diverged; use the projection method instead");
        }
        // The discrete unit multiplier is 1 - O(h^4); the scale drift it causes
        // is removed by the normalization, so periodicity is judged after it.
        report.closure = (m - m0).lpNorm<Eigen::Infinity>() / m0.lpNorm<Eigen::Infinity>();
        normalize(m);
        const double change = (m - m0).lpNorm<Eigen::Infinity>() / m0.lpNorm<Eigen::Infinity>();
        report.periods = pass;
        m0 = m;
        if (change < 1e-8) {
            std::vector<double> z(P);
            for (int k = 0; k < P; ++k) {
                const State& xk = xs[2 * k * per];
                const State b = input_direction(field, xk);
                double zk = 0.0;
                for (int i = 0; i < n; ++i) zk += nodes[k][i] * b[i];
                z[k] = zk;
            }
            report.model.omega = cycle.omega;
            report.model.period = cycle.period;
            report.model.Z = fit(z, opts.order);
            return report;
        }
    }
    throw Error(ErrorKind::AdjointUnstable,
                "adjoint solution not periodic after " + std::to_string(kMaxPeriods) +
                    " periods; use the projection method instead",
                report.closure);
}

PhaseModel prc_adjoint(const VectorField& field, const LimitCycle& cycle, const PrcOptions& opts) {
    return prc_adjoint_report(field, cycle, opts).model;
}

}  // namespace entrain
