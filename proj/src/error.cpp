#include "clab/error.hpp"

namespace clab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllDirectionsNull: return "AllDirectionsNull";
    case ErrorCode::DegeneratePencil: return "DegeneratePencil";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorCode::DegenerateImmersion: return "DegenerateImmersion";
    case ErrorCode::OnSigmaN: return "OnSigmaN";
    case ErrorCode::NotUmbilic: return "NotUmbilic";
    case ErrorCode::NotMorse: return "NotMorse";
    case ErrorCode::NotOnDiscriminant: return "NotOnDiscriminant";
    case ErrorCode::AllCoefficientsZero: return "AllCoefficientsZero";
    case ErrorCode::NotOnSigmaN: return "NotOnSigmaN";
    case ErrorCode::EllipticPoint: return "EllipticPoint";
    case ErrorCode::DegeneratePoint: return "DegeneratePoint";
    case ErrorCode::SeedElliptic: return "SeedElliptic";
    case ErrorCode::SeedDegenerate: return "SeedDegenerate";
    case ErrorCode::KernelDirection: return "KernelDirection";
    case ErrorCode::NormalCongruenceDegenerate: return "NormalCongruenceDegenerate";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace clab
