#include "qcomm/error.hpp"

namespace qcomm {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
        case ErrorCode::DegreeZero: return "DegreeZero";
        case ErrorCode::NotDistinctEigenvalues: return "NotDistinctEigenvalues";
        case ErrorCode::NotMember: return "NotMember";
        case ErrorCode::ZeroWeight: return "ZeroWeight";
        case ErrorCode::EnumerationCapExceeded: return "EnumerationCapExceeded";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace qcomm
