#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hsvol {

enum class ErrorKind {
    MalformedRow,
    DuplicateDate,
    NonFiniteValue,
    SeriesTooShort,
    DenominatorTooSmall,
    NonpositiveVolatility,
    DegenerateBase,
    InvalidParameter,
    ConstraintViolation,
    NumericalFailure,
    EmptyScenarios,
    ZeroVariance,
    InsufficientLength,
    MisalignedInput,
    InvalidWindow,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `index()` carries the offending
/// position (row, observation or step) when the failure has one.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(message), kind_(kind), index_(index) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> index_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::DuplicateDate: return "DuplicateDate";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::DenominatorTooSmall: return "DenominatorTooSmall";
    case ErrorKind::NonpositiveVolatility: return "NonpositiveVolatility";
    case ErrorKind::DegenerateBase: return "DegenerateBase";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::EmptyScenarios: return "EmptyScenarios";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::InsufficientLength: return "InsufficientLength";
    case ErrorKind::MisalignedInput: return "MisalignedInput";
    case ErrorKind::InvalidWindow: return "InvalidWindow";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

} // namespace hsvol
