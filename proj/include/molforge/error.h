//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_ERROR_H_
#define MOLFORGE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace molforge {

class Error: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidGraph: public Error {
public:
  using Error::Error;
};

// Parser errors carry the 0-based character offset of the offending input.
class PositionedError: public Error {
public:
  PositionedError(const std::string &kind, std::size_t position,
                  std::string reason)
      : Error(kind + " at position " + std::to_string(position) + ": "
              + reason),
        position_(position), reason_(std::move(reason)) { }

  std::size_t position() const noexcept { return position_; }
  const std::string &reason() const noexcept { return reason_; }

private:
  std::size_t position_;
  std::string reason_;
};

class SyntaxError: public PositionedError {
public:
  SyntaxError(std::size_t position, std::string reason)
      : PositionedError("syntax error", position, std::move(reason)) { }
};

class UnsupportedFeature: public PositionedError {
public:
  UnsupportedFeature(std::size_t position, std::string reason)
      : PositionedError("unsupported feature", position, std::move(reason)) { }
};

#define MOLFORGE_DEFINE_ERROR(Name)                                            \
  class Name: public Error {                                                   \
  public:                                                                      \
    using Error::Error;                                                        \
  }

MOLFORGE_DEFINE_ERROR(LengthMismatch);
MOLFORGE_DEFINE_ERROR(BadDistribution);
MOLFORGE_DEFINE_ERROR(TimestepOutOfRange);
MOLFORGE_DEFINE_ERROR(ZeroMass);
MOLFORGE_DEFINE_ERROR(DenoiserContract);
MOLFORGE_DEFINE_ERROR(DecodeError);
MOLFORGE_DEFINE_ERROR(TemplateUnsupported);
MOLFORGE_DEFINE_ERROR(MatchBudgetExceeded);
MOLFORGE_DEFINE_ERROR(EmptyFrontier);
MOLFORGE_DEFINE_ERROR(PredictorUnavailable);
MOLFORGE_DEFINE_ERROR(Inconsistent);
MOLFORGE_DEFINE_ERROR(ProtocolViolation);
MOLFORGE_DEFINE_ERROR(DimensionMismatch);
MOLFORGE_DEFINE_ERROR(UndefinedMetric);
MOLFORGE_DEFINE_ERROR(EmptyList);
MOLFORGE_DEFINE_ERROR(ConfigError);

#undef MOLFORGE_DEFINE_ERROR

}  // namespace molforge

#endif  // MOLFORGE_ERROR_H_
