#pragma once

#include <stdexcept>
#include <string>

namespace causelab {

// Malformed input: bad indices, overlapping sets, unknown names, parse errors.
// The CLI maps this family to exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A method's statistical or structural precondition does not hold for the
// data or model at hand (weak instrument, overlap violation, ...). The CLI maps
// this family to exit code 3.
class PreconditionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LimitExceeded : public PreconditionFailed {
 public:
  using PreconditionFailed::PreconditionFailed;
};

class ZeroProbabilityEvidence : public PreconditionFailed {
 public:
  using PreconditionFailed::PreconditionFailed;
};

class NonAbducible : public PreconditionFailed {
 public:
  using PreconditionFailed::PreconditionFailed;
};

class OverlapViolation : public PreconditionFailed {
 public:
  using PreconditionFailed::PreconditionFailed;
};

class WeakInstrument : public PreconditionFailed {
 public:
  using PreconditionFailed::PreconditionFailed;
};

class SeparationDetected : public PreconditionFailed {
 public:
  using PreconditionFailed::PreconditionFailed;
};

class SingularSystem : public PreconditionFailed {
 public:
  using PreconditionFailed::PreconditionFailed;
};

}  // namespace causelab
