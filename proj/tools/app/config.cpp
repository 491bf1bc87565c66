#include "config.hpp"

#include <fstream>
#include <set>

#include "catalogue.hpp"

namespace fundsol::app {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(field(k), "unknown field");
  }

  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k) && !j_.at(k).is_null();
  }

  std::string field(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  double number(const std::string& k, double& out) {
    if (!has(k)) return out;
    const auto& v = j_.at(k);
    if (!v.is_number()) throw ConfigError(field(k), "expected a number");
    return out = v.get<double>();
  }

  void number(const std::string& k, std::optional<double>& out) {
    if (!has(k)) return;
    double v = 0;
    number(k, v);
    out = v;
  }

  void integer(const std::string& k, int& out) {
    if (!has(k)) return;
    const auto& v = j_.at(k);
    if (!v.is_number_integer()) throw ConfigError(field(k), "expected an integer");
    out = v.get<int>();
  }

  void boolean(const std::string& k, bool& out) {
    if (!has(k)) return;
    const auto& v = j_.at(k);
    if (!v.is_boolean()) throw ConfigError(field(k), "expected true or false");
    out = v.get<bool>();
  }

  void string(const std::string& k, std::string& out) {
    if (!has(k)) return;
    const auto& v = j_.at(k);
    if (!v.is_string()) throw ConfigError(field(k), "expected a string");
    out = v.get<std::string>();
  }

  void numbers(const std::string& k, std::vector<double>& out) {
    if (!has(k)) return;
    const auto& v = j_.at(k);
    if (!v.is_array()) throw ConfigError(field(k), "expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(field(k) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
  }

  const json& child(const std::string& k) { return (seen_.insert(k), j_.at(k)); }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  Reader r(j, "");
  if (r.has("flux")) {
    const json& fj = r.child("flux");
    if (fj.is_string()) {
      c.flux.demo = fj.get<std::string>();
    } else {
      Reader fr(fj, "flux");
      fr.string("demo", c.flux.demo);
      if (fr.has("pieces")) {
        const json& pj = fr.child("pieces");
        require(pj.is_array() && !pj.empty(), "flux.pieces", "expected a non-empty array");
        for (std::size_t i = 0; i < pj.size(); ++i) {
          Reader pr(pj[i], "flux.pieces[" + std::to_string(i) + "]");
          PieceSpec p;
          pr.number("lo", p.lo);
          pr.number("hi", p.hi);
          pr.numbers("coeffs", p.coeffs);
          c.flux.pieces.push_back(std::move(p));
        }
      }
    }
  }
  r.number("mass", c.mass);
  r.number("t0", c.t0);
  r.number("t_end", c.t_end);
  if (r.has("tolerances")) {
    Reader tr(r.child("tolerances"), "tolerances");
    tr.number("tangency", c.tol.tangency);
    tr.number("envelope_min_width", c.tol.envelope_min_width);
    tr.number("classify", c.tol.classify);
    tr.number("level", c.tol.level);
    tr.integer("sweep_levels", c.tol.sweep_levels);
    tr.number("mass", c.tol.mass);
    tr.number("event_time", c.tol.event_time);
    tr.number("rel_rho_change", c.tol.rel_rho_change);
    tr.number("rel_time_step", c.tol.rel_time_step);
    tr.number("frame_spacing", c.tol.frame_spacing);
  }
  if (r.has("u_grid")) {
    Reader gr(r.child("u_grid"), "u_grid");
    gr.integer("nodes", c.u_grid_nodes);
    gr.number("min_ratio", c.u_grid_min_ratio);
  }
  r.numbers("snapshot_times", c.snapshot_times);
  r.string("output_dir", c.output_dir);
  if (r.has("envelope")) {
    Reader er(r.child("envelope"), "envelope");
    er.number("rho_bar", c.envelope.rho_bar);
    er.integer("samples", c.envelope.samples);
  }
  if (r.has("charmap")) {
    Reader cr(r.child("charmap"), "charmap");
    if (cr.has("seeds")) {
      const json& sj = cr.child("seeds");
      require(sj.is_array(), "charmap.seeds", "expected an array");
      for (std::size_t i = 0; i < sj.size(); ++i) {
        const std::string path = "charmap.seeds[" + std::to_string(i) + "]";
        Reader sr(sj[i], path);
        CharSeed s;
        sr.number("x", s.x);
        sr.number("t", s.t);
        std::string dir = "forward";
        sr.string("direction", dir);
        require(dir == "forward" || dir == "backward", path + ".direction", "expected forward or backward");
        s.direction = dir == "forward" ? TraceDirection::forward : TraceDirection::backward;
        c.charmap.seeds.push_back(s);
      }
    }
    cr.integer("auto_seeds", c.charmap.auto_seeds);
    cr.integer("raster_nx", c.charmap.raster_nx);
    cr.integer("raster_nt", c.charmap.raster_nt);
    cr.boolean("log_time", c.charmap.log_time);
    cr.number("rel_step", c.charmap.rel_step);
  }
  if (r.has("probe")) {
    Reader pr(r.child("probe"), "probe");
    if (pr.has("points")) {
      const json& pj = pr.child("points");
      require(pj.is_array(), "probe.points", "expected an array of [x, t] pairs");
      for (std::size_t i = 0; i < pj.size(); ++i) {
        const auto& p = pj[i];
        require(p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number(),
                "probe.points[" + std::to_string(i) + "]", "expected [x, t]");
        c.probe_points.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
    }
  }
  if (r.has("weno")) {
    Reader wr(r.child("weno"), "weno");
    wr.integer("cells", c.weno.cells);
    wr.number("cfl", c.weno.cfl);
    wr.string("init", c.weno.init);
    wr.integer("delta_width", c.weno.delta_width);
    wr.string("profile_csv", c.weno.profile_csv);
    wr.number("profile_t", c.weno.profile_t);
    wr.number("engine_t", c.weno.engine_t);
    wr.number("x_lo", c.weno.x_lo);
    wr.number("x_hi", c.weno.x_hi);
    wr.number("eps", c.weno.eps);
  }
  if (r.has("compare")) {
    Reader cr(r.child("compare"), "compare");
    cr.numbers("times", c.compare.times);
    cr.integer("search_cells", c.compare.search_cells);
    cr.integer("smear_cells", c.compare.smear_cells);
    cr.number("time_tol", c.compare.time_tol);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

void validate(const RunConfig& c) {
  require(!c.flux.demo.empty() || !c.flux.pieces.empty(), "flux", "give a demo name or polynomial pieces");
  require(c.flux.demo.empty() || c.flux.pieces.empty(), "flux", "demo and pieces are mutually exclusive");
  require(c.mass > 0, "mass", "must be positive");
  require(!c.t0 || *c.t0 > 0, "t0", "must be positive");
  require(c.t_end > 0 && (!c.t0 || c.t_end > *c.t0), "t_end", "must exceed t0");
  const std::pair<const char*, double> positive[] = {
      {"tolerances.tangency", c.tol.tangency},         {"tolerances.envelope_min_width", c.tol.envelope_min_width},
      {"tolerances.classify", c.tol.classify},         {"tolerances.level", c.tol.level},
      {"tolerances.mass", c.tol.mass},                 {"tolerances.event_time", c.tol.event_time},
      {"tolerances.rel_rho_change", c.tol.rel_rho_change}, {"tolerances.rel_time_step", c.tol.rel_time_step},
      {"tolerances.frame_spacing", c.tol.frame_spacing}, {"u_grid.min_ratio", c.u_grid_min_ratio},
      {"charmap.rel_step", c.charmap.rel_step},        {"weno.cfl", c.weno.cfl},
      {"weno.eps", c.weno.eps},                        {"compare.time_tol", c.compare.time_tol}};
  for (const auto& [name, v] : positive) require(v > 0, name, "must be positive");
  require(c.tol.sweep_levels >= 8, "tolerances.sweep_levels", "must be at least 8");
  require(c.u_grid_nodes >= 16, "u_grid.nodes", "must be at least 16");
  require(c.u_grid_min_ratio < 1, "u_grid.min_ratio", "must be below 1");
  for (std::size_t i = 0; i < c.snapshot_times.size(); ++i)
    require(c.snapshot_times[i] > 0, "snapshot_times[" + std::to_string(i) + "]", "must be positive");
  require(c.envelope.samples >= 2, "envelope.samples", "must be at least 2");
  require(!c.envelope.rho_bar || *c.envelope.rho_bar > 0, "envelope.rho_bar", "must be positive");
  require(c.charmap.auto_seeds >= 0, "charmap.auto_seeds", "must not be negative");
  require(c.charmap.raster_nx >= 0 && c.charmap.raster_nt >= 0, "charmap.raster_nx", "must not be negative");
  require(c.weno.init.empty() || c.weno.init == "delta" || c.weno.init == "profile" || c.weno.init == "engine", "weno.init",
          "expected delta, profile or engine");
  require(c.weno.init != "profile" || !c.weno.profile_csv.empty(), "weno.profile_csv", "required for init profile");
  require(c.weno.delta_width >= 1, "weno.delta_width", "must be at least 1");
  require(c.weno.cells >= 64, "weno.cells", "must be at least 64");
  require(c.weno.cfl <= 0.6, "weno.cfl", "must not exceed 0.6");
  require(!c.weno.x_lo == !c.weno.x_hi, "weno.x_lo", "give both x_lo and x_hi or neither");
  require(!c.weno.x_lo || *c.weno.x_hi > *c.weno.x_lo, "weno.x_hi", "must exceed x_lo");
  require(c.compare.search_cells >= 1 && c.compare.smear_cells >= 0, "compare.search_cells", "must be positive");
}

json to_json(const RunConfig& c) {
  json j;
  if (!c.flux.demo.empty()) {
    j["flux"] = {{"demo", c.flux.demo}};
  } else {
    json pieces = json::array();
    for (const auto& p : c.flux.pieces) pieces.push_back({{"lo", p.lo}, {"hi", p.hi}, {"coeffs", p.coeffs}});
    j["flux"] = {{"pieces", pieces}};
  }
  j["mass"] = c.mass;
  j["t0"] = c.t0 ? json(*c.t0) : json(nullptr);
  j["t_end"] = c.t_end;
  j["tolerances"] = {{"tangency", c.tol.tangency},
                     {"envelope_min_width", c.tol.envelope_min_width},
                     {"classify", c.tol.classify},
                     {"level", c.tol.level},
                     {"sweep_levels", c.tol.sweep_levels},
                     {"mass", c.tol.mass},
                     {"event_time", c.tol.event_time},
                     {"rel_rho_change", c.tol.rel_rho_change},
                     {"rel_time_step", c.tol.rel_time_step},
                     {"frame_spacing", c.tol.frame_spacing}};
  j["u_grid"] = {{"nodes", c.u_grid_nodes}, {"min_ratio", c.u_grid_min_ratio}};
  j["snapshot_times"] = c.snapshot_times;
  j["output_dir"] = c.output_dir;
  j["envelope"] = {{"rho_bar", c.envelope.rho_bar ? json(*c.envelope.rho_bar) : json(nullptr)},
                   {"samples", c.envelope.samples}};
  json seeds = json::array();
  for (const auto& s : c.charmap.seeds) seeds.push_back({{"x", s.x}, {"t", s.t}, {"direction", to_string(s.direction)}});
  j["charmap"] = {{"seeds", seeds},
                  {"auto_seeds", c.charmap.auto_seeds},
                  {"raster_nx", c.charmap.raster_nx},
                  {"raster_nt", c.charmap.raster_nt},
                  {"log_time", c.charmap.log_time},
                  {"rel_step", c.charmap.rel_step}};
  json points = json::array();
  for (const auto& [x, t] : c.probe_points) points.push_back({x, t});
  j["probe"] = {{"points", points}};
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j["weno"] = {{"cells", c.weno.cells},      {"cfl", c.weno.cfl},
               {"init", c.weno.init},        {"delta_width", c.weno.delta_width},
               {"profile_csv", c.weno.profile_csv}, {"profile_t", c.weno.profile_t},
               {"engine_t", opt(c.weno.engine_t)}, {"x_lo", opt(c.weno.x_lo)},
               {"x_hi", opt(c.weno.x_hi)},   {"eps", c.weno.eps}};
  j["compare"] = {{"times", c.compare.times},
                  {"search_cells", c.compare.search_cells},
                  {"smear_cells", c.compare.smear_cells},
                  {"time_tol", c.compare.time_tol}};
  return j;
}

Flux build_flux(const FluxSpec& spec) {
  if (!spec.demo.empty()) return find_demo(spec.demo).flux;
  std::vector<std::pair<std::pair<double, double>, std::vector<double>>> pieces;
  for (const auto& p : spec.pieces) pieces.push_back({{p.lo, p.hi}, p.coeffs});
  return Flux(std::move(pieces));
}

CatalogueOptions catalogue_options(const RunConfig& c) {
  CatalogueOptions o;
  o.sweep_levels = c.tol.sweep_levels;
  o.level_tol = c.tol.level;
  o.envelope.tangency_tol = c.tol.tangency;
  o.envelope.min_width = c.tol.envelope_min_width;
  return o;
}

EvolutionOptions evolution_options(const RunConfig& c) {
  EvolutionOptions o;
  o.grid.nodes = c.u_grid_nodes;
  o.grid.min_ratio = c.u_grid_min_ratio;
  o.t0 = c.t0;
  o.max_rel_rho_change = c.tol.rel_rho_change;
  o.max_rel_time_step = c.tol.rel_time_step;
  o.event_time_tol = c.tol.event_time;
  o.mass_tol = c.tol.mass;
  o.classify.tol = c.tol.classify;
  o.catalogue = catalogue_options(c);
  o.snapshot_times = c.snapshot_times;
  o.frame_spacing = c.tol.frame_spacing;
  return o;
}

}  // namespace fundsol::app
