#include "walkspec/error.hpp"

namespace walkspec {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidModel: return "InvalidModel";
        case ErrorKind::InvalidVertex: return "InvalidVertex";
        case ErrorKind::BallTooLarge: return "BallTooLarge";
        case ErrorKind::NegativeBias: return "NegativeBias";
        case ErrorKind::NonpositiveBias: return "NonpositiveBias";
        case ErrorKind::UnsupportedModel: return "UnsupportedModel";
        case ErrorKind::InvalidState: return "InvalidState";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::OutsideRadius: return "OutsideRadius";
        case ErrorKind::HypothesisViolated: return "HypothesisViolated";
        case ErrorKind::NoRoot: return "NoRoot";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::MultipleRoots: return "MultipleRoots";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::Inconclusive: return "Inconclusive";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace walkspec
