#pragma once

#include <string>
#include <vector>

#include "fundsol/flux.hpp"

namespace fundsol {

enum class EnvelopeKind { convex, concave };
enum class SegmentShape { follows_flux, linear };

struct Segment {
  double u_lo = 0;
  double u_hi = 0;
  SegmentShape shape = SegmentShape::follows_flux;
  double slope = 0;      // linear only
  double intercept = 0;  // linear only

  bool is_linear() const { return shape == SegmentShape::linear; }
  bool contains(double u) const { return u >= u_lo && u <= u_hi; }
};

/// Convex (greatest convex minorant) or concave (least concave majorant)
/// envelope of the flux on [0, rho_bar], with its minimal partition.
struct Envelope {
  double rho_bar = 0;
  EnvelopeKind kind = EnvelopeKind::convex;
  std::vector<Segment> segments;
  std::vector<double> partition;

  /// Index of the segment containing u; values beyond rho_bar map to the
  /// terminal segment (its natural extension).
  std::size_t segment_index(double u) const;
  const Segment& segment_at(double u) const { return segments[segment_index(u)]; }
  double value(const Flux& f, double u) const;
  /// Envelope derivative; on a linear segment this is the chord slope, on a
  /// follows_flux segment it is f'(u).
  double derivative(const Flux& f, double u) const;

  bool terminal_linear() const { return segments.back().is_linear(); }
  std::string shape_string() const;  // e.g. "LFL" for linear/follows/linear
  std::size_t linear_count() const;
};

struct EnvelopeOptions {
  /// Slope-residual tolerance accepted at interior partition points.
  double tangency_tol = 1e-10;
  /// Segments narrower than this (relative to max(1, rho_bar)) are dropped
  /// and their neighbours fused.
  double min_width = 1e-13;
};

Envelope convex_envelope(const Flux& f, double rho_bar, const EnvelopeOptions& opt = {});
Envelope concave_envelope(const Flux& f, double rho_bar, const EnvelopeOptions& opt = {});

/// Dense-sampling monotone-chain hull. Test-only ground truth; partition
/// points are accurate to about one sample spacing.
Envelope envelope_oracle(const Flux& f, double rho_bar, int n_samples, EnvelopeKind kind);

/// Shape sequences of both envelopes at a fixed rho_bar.
struct Signature {
  std::string convex;
  std::string concave;
  bool operator==(const Signature&) const = default;
};

Signature signature_at(const Flux& f, double rho_bar, const EnvelopeOptions& opt = {});

enum class LevelClass { branching, merging_candidate, transforming, other };

struct CriticalLevel {
  double rho = 0;
  LevelClass kind = LevelClass::other;
  bool eq20_holds = false;  // transforming candidates: f takes negative values
  Signature above;
  Signature below;
};

struct CriticalLevelCatalogue {
  std::vector<CriticalLevel> levels;  // decreasing rho
  /// signatures[i] holds on the open interval between levels[i-1] and
  /// levels[i] (signatures[0] above the top level).
  std::vector<Signature> signatures;
  double rho_max = 0;

  /// Largest level strictly below `rho`, if any.
  const CriticalLevel* next_below(double rho) const;
};

struct CatalogueOptions {
  int sweep_levels = 512;
  double level_tol = 1e-9;
  EnvelopeOptions envelope;
};

/// Throws DomainError when two signature changes cannot be separated at
/// `level_tol`.
CriticalLevelCatalogue critical_levels(const Flux& f, double rho_max,
                                       const CatalogueOptions& opt = {});

const char* to_string(LevelClass c);
const char* to_string(EnvelopeKind k);

}  // namespace fundsol
