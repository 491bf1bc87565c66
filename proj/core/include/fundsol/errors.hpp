#pragma once

#include <stdexcept>
#include <string>

namespace fundsol {

/// Bad input or an unreachable request: invalid mass, malformed flux,
/// a range the flux does not cover. Mapped to exit status 1 by the CLI.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The computed state contradicts a theorem the engine relies on
/// (entropy condition, event grammar, shock counts). Mapped to exit status 2.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DegenerateChordError : public DomainError {
 public:
  DegenerateChordError(double u1, double u2)
      : DomainError("degenerate chord: |u1-u2| below separation floor (u1=" +
                    std::to_string(u1) + ", u2=" + std::to_string(u2) + ")"),
        u1_(u1),
        u2_(u2) {}
  double u1() const { return u1_; }
  double u2() const { return u2_; }

 private:
  double u1_;
  double u2_;
};

class EntropyViolation : public ConsistencyError {
 public:
  using ConsistencyError::ConsistencyError;
};

class GrammarViolation : public ConsistencyError {
 public:
  using ConsistencyError::ConsistencyError;
};

}  // namespace fundsol
