#include "singdeg/error.hpp"

namespace singdeg {

std::string_view name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NoSupport: return "NoSupport";
        case ErrorCode::HasSupport: return "HasSupport";
        case ErrorCode::ZeroRow: return "ZeroRow";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::StructureViolation: return "StructureViolation";
        case ErrorCode::CyclicRelation: return "CyclicRelation";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::NotDAG: return "NotDAG";
        case ErrorCode::BadBoundary: return "BadBoundary";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::NonPositiveInput: return "NonPositiveInput";
        case ErrorCode::ImaginarySignLost: return "ImaginarySignLost";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::EigFailure: return "EigFailure";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace singdeg
