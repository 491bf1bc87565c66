#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fundsol/envelope.hpp"
#include "fundsol/flux.hpp"

namespace fundsol {

enum class ShockType { G, L, R, D };
enum class Orientation { increasing, decreasing };
enum class Anchor { zero, max, interior };

struct ShockDescriptor {
  double u_minus = 0;
  double u_plus = 0;
  double speed = 0;
  ShockType type = ShockType::G;
  Orientation orientation = Orientation::increasing;
  Anchor anchor = Anchor::interior;

  double u_lo() const { return std::min(u_minus, u_plus); }
  double u_hi() const { return std::max(u_minus, u_plus); }
};

struct ClassifyOptions {
  /// |f'(u) - speed| <= tol (1 + |speed|) counts as an Oleinik equality.
  double tol = 1e-8;
};

/// Throws EntropyViolation when f'(u_minus) >= speed >= f'(u_plus) fails
/// beyond the tolerance.
ShockType classify_shock(const Flux& f, double u_minus, double u_plus, const ClassifyOptions& opt = {});

/// One increasing shock per linear segment of `conv`, one decreasing shock
/// per linear segment of `conc`. Throws ConsistencyError when the shock
/// count rules are broken (at most one G; single-sided count, with G
/// counted twice, is 2 or 3).
std::vector<ShockDescriptor> shocks_from_state(const Flux& f, const Envelope& conv,
                                               const Envelope& conc, const ClassifyOptions& opt = {});

/// Single-sided count with every G contributing two.
int single_sided_count(const std::vector<ShockDescriptor>& shocks);

enum class EventKind { branching, merging, merging_branching, transforming };

struct Event {
  EventKind kind = EventKind::branching;
  double time = 0;
  double x = 0;
  std::vector<ShockType> incoming;
  std::vector<ShockType> outgoing;
  double rho_before = 0;
  double rho_after = 0;
};

struct TransitionCheck {
  bool ok = false;
  /// For a violation: what was wrong and the closest legal transition.
  std::string message;
};

TransitionCheck validate_transition(const std::vector<ShockType>& incoming,
                                    const std::vector<ShockType>& outgoing, EventKind kind,
                                    bool eq20_holds);

char to_char(ShockType t);
ShockType shock_type_from_char(char c);
const char* to_string(EventKind k);
const char* to_string(Orientation o);
const char* to_string(Anchor a);
std::optional<EventKind> event_kind_from_string(const std::string& s);
/// "R+D" style, sorted in the canonical G, L, R, D order.
std::string format_types(std::vector<ShockType> types);

}  // namespace fundsol
