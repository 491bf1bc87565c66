#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>

#include "catalogue.hpp"
#include "config.hpp"
#include "fundsol/waves.hpp"
#include "writers.hpp"

#ifndef FUNDSOL_VERSION
#define FUNDSOL_VERSION "unknown"
#endif

namespace fundsol::app {

using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::string flux;
  std::string out;
  double mass = 0;
  double t0 = 0;
  double t_end = 0;
  double rho_bar = 0;
  int cells = 0;
  std::string init;
  std::vector<double> snapshots;
  std::vector<double> times;
  std::vector<std::string> points;
};

void add_common(CLI::App* sub, Flags& fl) {
  sub->add_option("-c,--config", fl.config, "JSON run configuration");
  sub->add_option("--flux", fl.flux, "demo flux name (overrides the config)");
  sub->add_option("--mass", fl.mass, "total mass m");
  sub->add_option("--t0", fl.t0, "start time of the similarity phase");
  sub->add_option("--t-end", fl.t_end, "final time");
  sub->add_option("--snapshot", fl.snapshots, "snapshot time (repeatable)");
  sub->add_option("-o,--out", fl.out, "output directory");
}

bool given(const CLI::App* sub, const std::string& name) {
  const CLI::Option* o = sub->get_option_no_throw(name);
  return o && o->count() > 0;
}

RunConfig resolve(const CLI::App* sub, const Flags& fl) {
  RunConfig c = fl.config.empty() ? RunConfig{} : load_config(fl.config);
  if (given(sub, "--flux")) c.flux = FluxSpec{fl.flux, {}};
  if (given(sub, "--mass")) c.mass = fl.mass;
  if (given(sub, "--t0")) c.t0 = fl.t0;
  if (given(sub, "--t-end")) c.t_end = fl.t_end;
  if (given(sub, "--snapshot")) c.snapshot_times = fl.snapshots;
  if (given(sub, "--out")) c.output_dir = fl.out;
  if (given(sub, "--rho-bar")) c.envelope.rho_bar = fl.rho_bar;
  if (given(sub, "--cells")) c.weno.cells = fl.cells;
  if (given(sub, "--init")) c.weno.init = fl.init;
  if (given(sub, "--time")) c.compare.times = fl.times;
  for (std::size_t i = 0; i < fl.points.size(); ++i) {
    const std::string& p = fl.points[i];
    const auto comma = p.find(',');
    double x = 0, t = 0;
    char rest = 0;
    if (comma == std::string::npos || std::sscanf(p.c_str(), "%lf,%lf%c", &x, &t, &rest) != 2)
      throw ConfigError("--point[" + std::to_string(i) + "]", "expected X,T");
    c.probe_points.emplace_back(x, t);
  }
  return c;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

class Session {
 public:
  Session(std::string command, RunConfig cfg)
      : command_(std::move(command)),
        cfg_(std::move(cfg)),
        raw_(build_flux(cfg_.flux)),
        normalized_(normalize(raw_)),
        out_(cfg_.output_dir) {}

  const RunConfig& cfg() const { return cfg_; }
  const Flux& raw() const { return raw_; }
  const Flux& flux() const { return normalized_.first; }
  const NormalizationRecord& record() const { return normalized_.second; }
  OutputDir& out() { return out_; }
  json& summary() { return summary_; }

  /// Engine run to cfg.t_end with extra snapshot times.
  Timeline engine(const std::vector<double>& extra_snapshots = {}) const {
    EvolutionOptions eo = evolution_options(cfg_);
    eo.snapshot_times.insert(eo.snapshot_times.end(), extra_snapshots.begin(), extra_snapshots.end());
    eo.snapshot_times = sorted_unique(eo.snapshot_times);
    Timeline tl = run(flux(), cfg_.mass, cfg_.t_end, eo);
    tl.normalization = record();
    return tl;
  }

  void write_manifest() {
    json m;
    m["tool"] = "fundsol_cli";
    m["version"] = FUNDSOL_VERSION;
    m["command"] = command_;
    m["config"] = to_json(cfg_);
    m["normalization"] = {{"offset", record().offset}, {"drift", record().drift}};
    m["internal"] = {{"flux_join_tolerance", Flux::kJoinTolerance}, {"weno_stage_cfl_slack", kStageCflSlack}};
    m["summary"] = summary_;
    out_.path("manifest.json");
    m["outputs"] = out_.files();
    out_.write_json("manifest.json", m);
  }

 private:
  std::string command_;
  RunConfig cfg_;
  Flux raw_;
  std::pair<Flux, NormalizationRecord> normalized_;
  OutputDir out_;
  json summary_ = json::object();
};

std::vector<std::pair<double, double>> to_original(std::vector<std::pair<double, double>> p,
                                                   const NormalizationRecord& rec, double t) {
  for (auto& pt : p) pt.first = rec.to_original_x(pt.first, t);
  return p;
}

std::string indexed(const std::string& stem, std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%03zu.csv", k);
  return stem + buf;
}

double default_rho_bar(const Session& s) {
  const double t0 = s.cfg().t0 ? *s.cfg().t0 : default_t0(s.flux(), s.cfg().mass);
  return initial_rho_bar(s.flux(), s.cfg().mass, t0);
}

void cmd_envelope(Session& s, std::ostream& out) {
  const double rho = s.cfg().envelope.rho_bar ? *s.cfg().envelope.rho_bar : default_rho_bar(s);
  const EnvelopeOptions eo = catalogue_options(s.cfg()).envelope;
  const Envelope conv = convex_envelope(s.flux(), rho, eo);
  const Envelope conc = concave_envelope(s.flux(), rho, eo);
  // Envelopes of the raw flux differ from the normalized ones by the same
  // affine function; the partitions coincide.
  const auto& rec = s.record();
  std::ostringstream csv;
  csv << "u,f,h,k\n";
  const int n = s.cfg().envelope.samples;
  for (int i = 0; i < n; ++i) {
    const double u = rho * i / (n - 1);
    const double affine = rec.offset + rec.drift * u;
    csv << number_text(u) << ',' << number_text(s.raw()(u)) << ',' << number_text(conv.value(s.flux(), u) + affine) << ','
        << number_text(conc.value(s.flux(), u) + affine) << '\n';
  }
  s.out().write_text("envelope.csv", csv.str());
  const json part = partition_json(conv, conc);
  s.out().write_json("partition.json", part);
  s.summary() = {{"rho_bar", rho}};
  out << part.dump() << '\n';
}

void cmd_evolve(Session& s, std::ostream& out) {
  const Timeline tl = s.engine();
  s.out().write_json("events.json", events_json(tl));
  s.out().write_text("shocks.csv", shocks_csv(tl));
  s.out().write_text("steps.csv", steps_csv(tl));
  json snaps = json::array();
  for (std::size_t k = 0; k < tl.snapshots.size(); ++k) {
    const Snapshot& snap = tl.snapshots[k];
    const std::string name = indexed("snapshot", k);
    s.out().write_text(name, profile_csv(to_original(snap.profile, tl.normalization, snap.t)));
    snaps.push_back({{"t", snap.t}, {"file", name}});
  }
  s.summary() = {{"t0", tl.t0},
                 {"rho_bar_start", tl.steps.front().rho_bar},
                 {"rho_bar_end", tl.steps.back().rho_bar},
                 {"steps", tl.steps.size()},
                 {"events", tl.events.size()},
                 {"shock_curves", tl.shock_curves.size()},
                 {"max_mass_error", tl.max_mass_error},
                 {"rho_increase_count", tl.rho_increase_count},
                 {"simultaneous_events", tl.simultaneous_events},
                 {"tail_start", tl.tail_start ? json(*tl.tail_start) : json(nullptr)},
                 {"catalogue", catalogue_json(tl.catalogue)},
                 {"snapshots", snaps}};
  out << tl.events.size() << " events, " << tl.shock_curves.size() << " shock curves, max mass error "
      << number_text(tl.max_mass_error) << '\n';
}

std::pair<double, double> support_at(const Timeline& tl, double t) {
  const auto p = sample_profile(tl.frame_at(t));
  double lo = p.front().first, hi = p.front().first;
  for (const auto& [x, u] : p) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double frame_t = tl.frame_at(t).t;
  return {lo * t / frame_t, hi * t / frame_t};
}

void cmd_charmap(Session& s, std::ostream& out) {
  const Timeline tl = s.engine();
  CharMapSpec spec;
  for (CharSeed seed : s.cfg().charmap.seeds) {
    seed.x = tl.normalization.to_normalized_x(seed.x, seed.t);
    spec.characteristics.push_back(seed);
  }
  const int n = s.cfg().charmap.auto_seeds;
  const double t_late = tl.t_end;
  const double t_early = std::max(tl.t0, tl.t_end / 50);
  for (const auto& [t, dir] : {std::pair{t_early, TraceDirection::forward}, std::pair{t_late, TraceDirection::backward}}) {
    const auto [lo, hi] = support_at(tl, t);
    for (int i = 0; i < n; ++i) spec.characteristics.push_back({lo + (i + 0.5) / n * (hi - lo), t, dir});
  }
  spec.raster_nx = s.cfg().charmap.raster_nx;
  spec.raster_nt = s.cfg().charmap.raster_nt;
  spec.log_time = s.cfg().charmap.log_time;
  spec.trace.rel_step = s.cfg().charmap.rel_step;
  const CharMap map = build_charmap(tl, spec);
  {
    std::ofstream svg(s.out().path("charmap.svg"));
    write_charmap_svg(map, svg);
  }
  {
    std::ofstream csv(s.out().path("charmap.csv"));
    write_charmap_csv(map, csv);
  }
  s.summary() = {{"frame", "normalized"},
                 {"characteristics", map.characteristics.size()},
                 {"shocks", map.shocks.size()},
                 {"events", map.events.size()},
                 {"fans", map.fans.size()}};
  out << map.characteristics.size() << " characteristics, " << map.shocks.size() << " shocks\n";
}

void cmd_probe(Session& s, std::ostream& out) {
  if (s.cfg().probe_points.empty()) throw ConfigError("probe.points", "no probe points given");
  const Timeline tl = s.engine();
  const SolutionField field(tl);
  std::ostringstream csv;
  csv << "x,t,u_left,u_right\n";
  for (std::size_t i = 0; i < s.cfg().probe_points.size(); ++i) {
    const auto [x, t] = s.cfg().probe_points[i];
    if (!(t >= field.t_min() && t <= field.t_max()))
      throw ConfigError("probe.points[" + std::to_string(i) + "]", "t outside [" + number_text(field.t_min()) + ", " +
                                                                       number_text(field.t_max()) + "]");
    const auto [ul, ur] = field.value(tl.normalization.to_normalized_x(x, t), t);
    csv << number_text(x) << ',' << number_text(t) << ',' << number_text(ul) << ',' << number_text(ur) << '\n';
  }
  s.out().write_text("probe.csv", csv.str());
  s.summary() = {{"points", s.cfg().probe_points.size()}};
  out << s.cfg().probe_points.size() << " points\n";
}

struct WenoPlan {
  WenoInit init;
  WenoOptions opt;
  double t_start = 0;
};

/// Initial data and domain for a grid run ending at `t_end`; `tl` is an
/// engine run holding a snapshot at the engine start time when needed.
WenoPlan plan_weno(const Session& s, const std::string& init, double engine_t, const Timeline* tl, double t_end) {
  const WenoConfig& wc = s.cfg().weno;
  WenoPlan p;
  if (init == "delta") {
    p.init = DeltaBox{s.cfg().mass, wc.delta_width};
  } else if (init == "profile") {
    p.init = ProfileInit{read_profile_csv(wc.profile_csv), wc.profile_t};
    p.t_start = wc.profile_t;
  } else {
    const Snapshot* snap = nullptr;
    for (const auto& sn : tl->snapshots)
      if (std::abs(sn.t - engine_t) <= 1e-12 * std::max(1.0, engine_t)) snap = &sn;
    if (!snap) throw ConsistencyError("engine snapshot missing at the grid start time");
    p.init = ProfileInit{to_original(snap->profile, tl->normalization, snap->t), snap->t};
    p.t_start = snap->t;
  }
  p.opt.cells = wc.cells;
  p.opt.cfl = wc.cfl;
  p.opt.weno_eps = wc.eps;
  p.opt.t_end = t_end;
  if (wc.x_lo) {
    p.opt.x_lo = *wc.x_lo;
    p.opt.x_hi = *wc.x_hi;
  } else {
    std::tie(p.opt.x_lo, p.opt.x_hi) = support_bounds(*tl, t_end);
  }
  return p;
}

json grid_json(const GridSolution& g) {
  return {{"cells", g.x.size()},  {"dx", g.dx},
          {"x_lo", g.x_lo},       {"x_hi", g.x_hi},
          {"order", g.order},     {"cfl", g.cfl},
          {"alpha_max", g.alpha_max}, {"steps", g.steps},
          {"rejected_steps", g.rejected_steps}, {"mass0", g.mass0},
          {"max_mass_drift", g.max_mass_drift}, {"u_min", g.u_min},
          {"u_max", g.u_max}};
}

json write_grid_snapshots(Session& s, const GridSolution& g) {
  json snaps = json::array();
  for (std::size_t k = 0; k < g.snapshots.size(); ++k) {
    const std::string name = indexed("weno", k);
    s.out().write_text(name, grid_csv(g, g.snapshots[k]));
    snaps.push_back({{"t", g.snapshots[k].t}, {"file", name}});
  }
  return snaps;
}

double default_engine_t(const Session& s, const std::vector<double>& times) {
  if (s.cfg().weno.engine_t) return *s.cfg().weno.engine_t;
  return (times.empty() ? s.cfg().t_end : *std::min_element(times.begin(), times.end())) / 10;
}

void check_engine_t(const Session& s, double engine_t) {
  const double t0 = s.cfg().t0 ? *s.cfg().t0 : default_t0(s.flux(), s.cfg().mass);
  if (!(engine_t >= t0 && engine_t < s.cfg().t_end))
    throw ConfigError("weno.engine_t", "must lie in [t0, t_end) = [" + number_text(t0) + ", " +
                                           number_text(s.cfg().t_end) + ")");
}

void cmd_weno(Session& s, std::ostream& out) {
  const std::string init = s.cfg().weno.init.empty() ? "delta" : s.cfg().weno.init;
  const double engine_t = default_engine_t(s, s.cfg().snapshot_times);
  std::optional<Timeline> tl;
  if (init == "engine" || !s.cfg().weno.x_lo) {
    if (init == "engine") check_engine_t(s, engine_t);
    tl = s.engine(init == "engine" ? std::vector<double>{engine_t} : std::vector<double>{});
  }
  WenoPlan p = plan_weno(s, init, engine_t, tl ? &*tl : nullptr, s.cfg().t_end);
  for (double t : s.cfg().snapshot_times)
    if (t > p.t_start) p.opt.snapshot_times.push_back(t);
  const GridSolution g = weno_run(s.raw(), p.init, p.opt);
  json summary = grid_json(g);
  summary["init"] = init;
  summary["t_start"] = p.t_start;
  summary["snapshots"] = write_grid_snapshots(s, g);
  s.out().write_json("weno.json", summary);
  s.summary() = summary;
  out << g.steps << " steps, max mass drift " << number_text(g.max_mass_drift) << '\n';
}

void cmd_compare(Session& s, std::ostream& out) {
  std::vector<double> times = s.cfg().compare.times.empty() ? std::vector<double>{s.cfg().t_end} : s.cfg().compare.times;
  times = sorted_unique(times);
  for (std::size_t i = 0; i < times.size(); ++i)
    if (!(times[i] > 0 && times[i] <= s.cfg().t_end))
      throw ConfigError("compare.times[" + std::to_string(i) + "]", "must lie in (0, t_end]");
  const std::string init = s.cfg().weno.init.empty() ? "engine" : s.cfg().weno.init;
  const double engine_t = default_engine_t(s, times);
  if (init == "engine") check_engine_t(s, engine_t);
  std::vector<double> extra = times;
  if (init == "engine") extra.push_back(engine_t);
  const Timeline tl = s.engine(extra);
  WenoPlan p = plan_weno(s, init, engine_t, &tl, times.back());
  for (double t : times)
    if (t < p.t_start) throw ConfigError("compare.times", "times must follow the grid start time");
  p.opt.snapshot_times = times;
  const GridSolution g = weno_run(s.raw(), p.init, p.opt);
  CompareOptions co;
  co.search_cells = s.cfg().compare.search_cells;
  co.smear_cells = s.cfg().compare.smear_cells;
  co.time_tol = s.cfg().compare.time_tol;
  const auto report = compare_solutions(tl, g, times, co);
  json a = json::array();
  for (const CompareEntry& e : report) {
    json shocks = json::array();
    for (const ShockOffset& o : e.shocks)
      shocks.push_back({{"id", o.id},
                        {"type", std::string(1, to_char(o.type))},
                        {"x_timeline", o.x_timeline},
                        {"x_grid", o.x_grid},
                        {"offset_cells", o.offset_cells}});
    a.push_back({{"time", e.t}, {"l1", e.l1}, {"shocks", shocks}});
    out << "t=" << number_text(e.t) << " l1=" << number_text(e.l1) << " shocks=" << e.shocks.size() << '\n';
  }
  s.out().write_json("compare.json", a);
  json summary = grid_json(g);
  summary["init"] = init;
  summary["t_start"] = p.t_start;
  summary["snapshots"] = write_grid_snapshots(s, g);
  s.out().write_json("weno.json", summary);
  s.summary() = summary;
}

void cmd_catalog(const RunConfig& cfg, const std::string& only, std::ostream& out) {
  OutputDir dir(cfg.output_dir);
  json list = json::array();
  for (const DemoFlux& d : demo_catalogue()) {
    if (!only.empty() && d.name != only) continue;
    const Flux f = normalize(d.flux).first;
    const double t0 = default_t0(f, cfg.mass);
    const double rho0 = initial_rho_bar(f, cfg.mass, t0);
    const auto cat = critical_levels(f, rho0, catalogue_options(cfg));
    list.push_back({{"name", d.name},
                    {"formula", d.formula},
                    {"domain_max", f.domain_max()},
                    {"inflections", inflection_points(f, f.domain_max())},
                    {"mass", cfg.mass},
                    {"catalogue", catalogue_json(cat)}});
    out << d.name << ": " << d.formula << "\n";
    for (const auto& l : cat.levels)
      out << "  rho=" << number_text(l.rho) << ' ' << to_string(l.kind) << (l.eq20_holds ? " (flux takes negative values)" : "") << '\n';
  }
  if (list.empty()) throw ConfigError("flux", "unknown demo '" + only + "'");
  dir.write_json("catalog.json", list);
  json m = {{"tool", "fundsol_cli"},
            {"version", FUNDSOL_VERSION},
            {"command", "catalog"},
            {"config", to_json(cfg)},
            {"outputs", {"catalog.json", "manifest.json"}}};
  dir.write_json("manifest.json", m);
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fundamental solutions of scalar conservation laws"};
  app.require_subcommand(1);
  Flags fl;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"envelope", "convex and concave envelopes of the flux"},
                      {"evolve", "evolve the fundamental solution; events, shocks, snapshots"},
                      {"charmap", "characteristic map as SVG and CSV"},
                      {"probe", "evaluate the solution at (x, t) points"},
                      {"weno", "fifth-order WENO reference run"},
                      {"compare", "compare the engine against WENO"},
                      {"catalog", "list demo fluxes and their critical levels"}};
  std::map<std::string, CLI::App*> cmds;
  for (const Sub& s : subs) cmds[s.name] = app.add_subcommand(s.name, s.help);
  for (auto& [name, sub] : cmds) add_common(sub, fl);
  cmds["envelope"]->add_option("--rho-bar", fl.rho_bar, "upper end of the envelope interval");
  cmds["probe"]->add_option("--point", fl.points, "probe point X,T (repeatable)");
  for (const char* name : {"weno", "compare"}) {
    cmds[name]->add_option("--cells", fl.cells, "grid cells");
    cmds[name]->add_option("--init", fl.init, "delta, profile or engine");
  }
  cmds["compare"]->add_option("--time", fl.times, "comparison time (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  std::string name;
  CLI::App* sub = nullptr;
  for (auto& [n, s] : cmds)
    if (s->parsed()) name = n, sub = s;

  try {
    RunConfig cfg = resolve(sub, fl);
    if (name == "catalog") {
      if (cfg.flux.pieces.size()) throw ConfigError("flux", "catalog lists demo fluxes only");
      if (!(cfg.mass > 0)) throw ConfigError("mass", "must be positive");
      cmd_catalog(cfg, cfg.flux.demo, out);
      return 0;
    }
    validate(cfg);
    Session s(name, cfg);
    if (name == "envelope") cmd_envelope(s, out);
    else if (name == "evolve") cmd_evolve(s, out);
    else if (name == "charmap") cmd_charmap(s, out);
    else if (name == "probe") cmd_probe(s, out);
    else if (name == "weno") cmd_weno(s, out);
    else cmd_compare(s, out);
    s.write_manifest();
    return 0;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << '\n';
    return 1;
  } catch (const ConsistencyError& e) {
    err << "consistency error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace fundsol::app
