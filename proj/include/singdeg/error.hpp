#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace singdeg {

enum class ErrorCode {
    NoSupport,
    HasSupport,
    ZeroRow,
    NotSymmetric,
    NegativeEntry,
    StructureViolation,
    CyclicRelation,
    TooLarge,
    Infeasible,
    NotDAG,
    BadBoundary,
    NonConvergence,
    PreconditionViolated,
    NonPositiveInput,
    ImaginarySignLost,
    GridTooCoarse,
    EigFailure,
    SingularMatrix,
    ParseError,
    InvalidArgument,
    Internal,
};

std::string_view name(ErrorCode code);

/// Exception carrying a machine-readable code; the CLI maps codes to exit statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(name(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace singdeg
