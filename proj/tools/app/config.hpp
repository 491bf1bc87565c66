#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fundsol/errors.hpp"
#include "fundsol/evolution.hpp"
#include "fundsol/waves.hpp"
#include "fundsol/weno.hpp"

namespace fundsol::app {

/// A malformed configuration; `field` is a dotted path such as "weno.cells".
class ConfigError : public DomainError {
 public:
  ConfigError(const std::string& field, const std::string& what) : DomainError("config: " + field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct PieceSpec {
  double lo = 0;
  double hi = 0;
  std::vector<double> coeffs;  // ascending degree in u
};

/// Either a demo name or explicit polynomial pieces covering [0, domain_max].
struct FluxSpec {
  std::string demo;
  std::vector<PieceSpec> pieces;
};

struct Tolerances {
  double tangency = 1e-10;
  double envelope_min_width = 1e-13;
  double classify = 1e-8;
  double level = 1e-9;
  int sweep_levels = 512;
  double mass = 1e-6;
  double event_time = 1e-9;
  double rel_rho_change = 0.005;
  double rel_time_step = 0.02;
  double frame_spacing = 0.05;
};

struct EnvelopeConfig {
  std::optional<double> rho_bar;
  int samples = 401;
};

struct CharmapConfig {
  std::vector<CharSeed> seeds;
  /// Evenly spread seeds over the support at this many times, both ways.
  int auto_seeds = 8;
  int raster_nx = 0;
  int raster_nt = 0;
  bool log_time = false;
  double rel_step = 0.004;
};

struct WenoConfig {
  int cells = 2048;
  double cfl = 0.5;
  /// "delta", "profile" or "engine"; empty picks delta for `weno` and
  /// engine for `compare`.
  std::string init;
  int delta_width = 4;
  std::string profile_csv;
  double profile_t = 0;
  /// Start time for init "engine": the engine's profile at that time.
  std::optional<double> engine_t;
  std::optional<double> x_lo;
  std::optional<double> x_hi;
  double eps = 1e-6;
};

struct CompareConfig {
  std::vector<double> times;
  int search_cells = 12;
  int smear_cells = 3;
  double time_tol = 1e-9;
};

struct RunConfig {
  FluxSpec flux;
  double mass = 1.0;
  std::optional<double> t0;
  double t_end = 10.0;
  Tolerances tol;
  int u_grid_nodes = 4096;
  double u_grid_min_ratio = 1e-5;
  std::vector<double> snapshot_times;
  std::string output_dir = "out";
  EnvelopeConfig envelope;
  CharmapConfig charmap;
  std::vector<std::pair<double, double>> probe_points;  // (x, t)
  WenoConfig weno;
  CompareConfig compare;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Field-level checks of value ranges; throws ConfigError.
void validate(const RunConfig& c);
nlohmann::json to_json(const RunConfig& c);

/// The raw flux described by the config (not yet normalized).
Flux build_flux(const FluxSpec& spec);

EvolutionOptions evolution_options(const RunConfig& c);
CatalogueOptions catalogue_options(const RunConfig& c);

}  // namespace fundsol::app
