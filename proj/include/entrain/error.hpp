#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace entrain {

enum class ErrorKind {
    InvalidArgument,
    IntegrationDiverged,
    NoLimitCycle,
    NotConverged,
    InsufficientResolution,
    DegenerateMonodromy,
    EigenvectorNotConverged,
    SingularNormalization,
    AdjointUnstable,
    EntrainmentImpossible,
    UndefinedLimit,
    InfeasibleEnergy,
    NoRangeGain,
    NoTongue,
    InsufficientData,
    InsufficientDecay,
    NoBoundaryFound,
};

std::string_view to_string(ErrorKind kind);

// Shortest round-trip text of a double, for messages.
std::string num(double x);

// Every failure raised by the library. `value` carries a numeric detail for
// errors that have one (the failing step, the minimum feasible energy, ...).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<double> value = std::nullopt)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), value_(value) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::optional<double> value() const noexcept { return value_; }

private:
    ErrorKind kind_;
    std::optional<double> value_;
};

}  // namespace entrain
