#include "fundsol/classify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "fundsol/errors.hpp"

namespace fundsol {

ShockType classify_shock(const Flux& f, double u_minus, double u_plus, const ClassifyOptions& opt) {
  const double speed = rh_speed(f, u_minus, u_plus);
  const double band = opt.tol * (1.0 + std::abs(speed));
  const double left = f.slope(u_minus) - speed;
  const double right = speed - f.slope(u_plus);
  if (left < -band || right < -band) {
    std::ostringstream os;
    os.precision(17);
    os << "Oleinik condition violated for (" << u_minus << " -> " << u_plus << "): f'(u-)-s=" << left
       << ", s-f'(u+)=" << right;
    throw EntropyViolation(os.str());
  }
  const bool left_eq = left <= band;
  const bool right_eq = right <= band;
  if (left_eq && right_eq) return ShockType::D;
  if (left_eq) return ShockType::L;
  if (right_eq) return ShockType::R;
  return ShockType::G;
}

int single_sided_count(const std::vector<ShockDescriptor>& shocks) {
  int n = 0;
  for (const auto& s : shocks) {
    if (s.type == ShockType::G) n += 2;
    if (s.type == ShockType::L || s.type == ShockType::R) n += 1;
  }
  return n;
}

std::vector<ShockDescriptor> shocks_from_state(const Flux& f, const Envelope& conv, const Envelope& conc,
                                               const ClassifyOptions& opt) {
  if (conv.rho_bar != conc.rho_bar) throw DomainError("shocks_from_state: envelopes disagree on rho_bar");
  const double rho = conv.rho_bar;
  std::vector<ShockDescriptor> out;
  auto add = [&](const Envelope& env, Orientation o) {
    for (const auto& seg : env.segments) {
      if (!seg.is_linear()) continue;
      ShockDescriptor s;
      s.orientation = o;
      s.u_minus = o == Orientation::increasing ? seg.u_lo : seg.u_hi;
      s.u_plus = o == Orientation::increasing ? seg.u_hi : seg.u_lo;
      s.speed = rh_speed(f, s.u_minus, s.u_plus);
      s.type = classify_shock(f, s.u_minus, s.u_plus, opt);
      if (seg.u_hi >= rho)
        s.anchor = Anchor::max;
      else if (seg.u_lo <= 0.0)
        s.anchor = Anchor::zero;
      else
        s.anchor = Anchor::interior;
      out.push_back(s);
    }
  };
  add(conv, Orientation::increasing);
  add(conc, Orientation::decreasing);

  const auto genuine = std::count_if(out.begin(), out.end(), [](const auto& s) { return s.type == ShockType::G; });
  if (genuine > 1) throw ConsistencyError("more than one genuine shock at rho_bar=" + std::to_string(rho));
  const int single = single_sided_count(out);
  if (single < 2 || single > 3)
    throw ConsistencyError("single-sided contact count " + std::to_string(single) + " outside {2,3} at rho_bar=" +
                           std::to_string(rho));
  return out;
}

namespace {

using Multiset = std::array<int, 4>;  // counts of G, L, R, D

Multiset count(const std::vector<ShockType>& v) {
  Multiset m{0, 0, 0, 0};
  for (ShockType t : v) ++m[static_cast<int>(t)];
  return m;
}

struct Rule {
  EventKind kind;
  const char* in;
  const char* out;
};

constexpr Rule kRules[] = {
    {EventKind::branching, "R", "RD"},         {EventKind::branching, "L", "LD"},
    {EventKind::branching, "G", "RL"},         {EventKind::merging, "RR", "G"},
    {EventKind::merging, "LL", "G"},           {EventKind::merging, "RD", "L"},
    {EventKind::merging, "LD", "R"},           {EventKind::merging_branching, "RR", "RL"},
    {EventKind::merging_branching, "LL", "RL"}, {EventKind::merging_branching, "RD", "LD"},
    {EventKind::merging_branching, "LD", "RD"}, {EventKind::transforming, "G", "R"},
    {EventKind::transforming, "G", "L"},       {EventKind::transforming, "RR", "L"},
    {EventKind::transforming, "LL", "R"},
};

std::vector<ShockType> parse(const char* s) {
  std::vector<ShockType> v;
  for (; *s; ++s) v.push_back(shock_type_from_char(*s));
  return v;
}

int distance(const Multiset& a, const Multiset& b) {
  int d = 0;
  for (int i = 0; i < 4; ++i) d += std::abs(a[i] - b[i]);
  return d;
}

}  // namespace

TransitionCheck validate_transition(const std::vector<ShockType>& incoming, const std::vector<ShockType>& outgoing,
                                    EventKind kind, bool eq20_holds) {
  if (incoming.empty() || outgoing.empty()) return {false, "transition lists must be nonempty"};
  const Multiset in = count(incoming);
  const Multiset out = count(outgoing);
  const Rule* nearest = nullptr;
  int best = 1 << 30;
  for (const Rule& r : kRules) {
    const Multiset rin = count(parse(r.in));
    Multiset rout = count(parse(r.out));
    if (r.kind == kind && rin == in) {
      // Extra outgoing D contacts are allowed after a merging that branches.
      if (kind == EventKind::merging_branching && out[3] >= rout[3]) {
        Multiset trimmed = out;
        trimmed[3] = rout[3];
        if (trimmed == rout) rout = out;
      }
      if (rout == out) {
        if (kind == EventKind::transforming && !eq20_holds)
          return {false, "transforming " + format_types(incoming) + " -> " + format_types(outgoing) +
                             " requires the flux to take negative values on the solution range"};
        return {true, {}};
      }
    }
    const int d = distance(rin, in) + distance(rout, out) + (r.kind == kind ? 0 : 1);
    if (d < best) {
      best = d;
      nearest = &r;
    }
  }
  std::ostringstream os;
  os << to_string(kind) << ' ' << format_types(incoming) << " -> " << format_types(outgoing)
     << " is not a legal transition; nearest legal: " << to_string(nearest->kind) << ' '
     << format_types(parse(nearest->in)) << " -> " << format_types(parse(nearest->out));
  return {false, os.str()};
}

char to_char(ShockType t) {
  switch (t) {
    case ShockType::G: return 'G';
    case ShockType::L: return 'L';
    case ShockType::R: return 'R';
    case ShockType::D: return 'D';
  }
  return '?';
}

ShockType shock_type_from_char(char c) {
  switch (c) {
    case 'G': return ShockType::G;
    case 'L': return ShockType::L;
    case 'R': return ShockType::R;
    case 'D': return ShockType::D;
  }
  throw DomainError(std::string("unknown shock type '") + c + "'");
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::branching: return "branching";
    case EventKind::merging: return "merging";
    case EventKind::merging_branching: return "merging_branching";
    case EventKind::transforming: return "transforming";
  }
  return "?";
}

std::optional<EventKind> event_kind_from_string(const std::string& s) {
  for (EventKind k : {EventKind::branching, EventKind::merging, EventKind::merging_branching, EventKind::transforming})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

const char* to_string(Orientation o) { return o == Orientation::increasing ? "increasing" : "decreasing"; }

const char* to_string(Anchor a) {
  switch (a) {
    case Anchor::zero: return "zero";
    case Anchor::max: return "max";
    case Anchor::interior: return "interior";
  }
  return "?";
}

std::string format_types(std::vector<ShockType> types) {
  std::sort(types.begin(), types.end());
  std::string s;
  for (ShockType t : types) {
    if (!s.empty()) s += '+';
    s += to_char(t);
  }
  return s;
}

}  // namespace fundsol
