#include "entrain/error.hpp"

#include <array>
#include <charconv>

namespace entrain {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::IntegrationDiverged: return "integration-diverged";
        case ErrorKind::NoLimitCycle: return "no-limit-cycle";
        case ErrorKind::NotConverged: return "not-converged";
        case ErrorKind::InsufficientResolution: return "insufficient-resolution";
        case ErrorKind::DegenerateMonodromy: return "degenerate-monodromy";
        case ErrorKind::EigenvectorNotConverged: return "eigenvector-not-converged";
        case ErrorKind::SingularNormalization: return "singular-normalization";
        case ErrorKind::AdjointUnstable: return "adjoint-unstable";
        case ErrorKind::EntrainmentImpossible: return "entrainment-impossible";
        case ErrorKind::UndefinedLimit: return "undefined-limit";
        case ErrorKind::InfeasibleEnergy: return "infeasible-energy";
        case ErrorKind::NoRangeGain: return "no-range-gain";
        case ErrorKind::NoTongue: return "no-tongue";
        case ErrorKind::InsufficientData: return "insufficient-data";
        case ErrorKind::InsufficientDecay: return "insufficient-decay";
        case ErrorKind::NoBoundaryFound: return "no-boundary-found";
    }
    return "unknown";
}

std::string num(double x) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

}  // namespace entrain
