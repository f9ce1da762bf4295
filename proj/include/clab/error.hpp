#pragma once

#include <stdexcept>
#include <string>

namespace clab {

enum class ErrorCode {
  AllDirectionsNull,
  DegeneratePencil,
  OutOfDomain,
  DerivativeUnavailable,
  DegenerateImmersion,
  OnSigmaN,
  NotUmbilic,
  NotMorse,
  NotOnDiscriminant,
  AllCoefficientsZero,
  NotOnSigmaN,
  EllipticPoint,
  DegeneratePoint,
  SeedElliptic,
  SeedDegenerate,
  KernelDirection,
  NormalCongruenceDegenerate,
  ParseError,
  SchemaError,
  RangeError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace clab
