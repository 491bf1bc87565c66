#include "writers.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fundsol/errors.hpp"

namespace fundsol::app {

using nlohmann::json;

std::string number_text(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw DomainError("cannot create output directory '" + root_.string() + "': " + ec.message());
}

std::filesystem::path OutputDir::path(const std::string& name) {
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  return root_ / name;
}

void OutputDir::write_text(const std::string& name, const std::string& text) {
  std::ofstream out(path(name), std::ios::binary);
  if (!out) throw DomainError("cannot write '" + (root_ / name).string() + "'");
  out << text;
}

void OutputDir::write_json(const std::string& name, const json& j) { write_text(name, j.dump(2) + "\n"); }

namespace {
json types_json(const std::vector<ShockType>& types) {
  json a = json::array();
  for (ShockType t : types) a.push_back(std::string(1, to_char(t)));
  return a;
}
}  // namespace

json events_json(const Timeline& tl) {
  json a = json::array();
  for (const Event& e : tl.events) {
    a.push_back({{"kind", to_string(e.kind)},
                 {"time", e.time},
                 {"x", tl.normalization.to_original_x(e.x, e.time)},
                 {"incoming", types_json(e.incoming)},
                 {"outgoing", types_json(e.outgoing)},
                 {"rho_before", e.rho_before},
                 {"rho_after", e.rho_after}});
  }
  return a;
}

std::string shocks_csv(const Timeline& tl) {
  std::ostringstream os;
  os << "shock_id,t,x,type\n";
  for (const ShockCurve& c : tl.shock_curves)
    for (const ShockSample& s : c.samples)
      os << c.id << ',' << number_text(s.t) << ',' << number_text(tl.normalization.to_original_x(s.x, s.t)) << ','
         << to_char(s.type) << '\n';
  return os.str();
}

std::string steps_csv(const Timeline& tl) {
  std::ostringstream os;
  os << "t,rho_bar,mass_error,genuine,single_sided\n";
  for (const StepRecord& s : tl.steps)
    os << number_text(s.t) << ',' << number_text(s.rho_bar) << ',' << number_text(s.mass_error) << ',' << s.genuine
       << ',' << s.single_sided << '\n';
  return os.str();
}

std::string profile_csv(const std::vector<std::pair<double, double>>& profile) {
  std::ostringstream os;
  os << "x,u\n";
  for (const auto& [x, u] : profile) os << number_text(x) << ',' << number_text(u) << '\n';
  return os.str();
}

std::string grid_csv(const GridSolution& g, const GridSnapshot& s) {
  std::ostringstream os;
  os << "x,u\n";
  for (std::size_t i = 0; i < s.u.size(); ++i)
    os << number_text(g.x[i]) << ',' << number_text(s.u[i]) << '\n';
  return os.str();
}

json catalogue_json(const CriticalLevelCatalogue& cat) {
  json levels = json::array();
  for (const CriticalLevel& l : cat.levels)
    levels.push_back({{"rho", l.rho},
                      {"kind", to_string(l.kind)},
                      {"eq20_holds", l.eq20_holds},
                      {"above", {{"convex", l.above.convex}, {"concave", l.above.concave}}},
                      {"below", {{"convex", l.below.convex}, {"concave", l.below.concave}}}});
  return {{"rho_max", cat.rho_max}, {"levels", levels}};
}

json partition_json(const Envelope& conv, const Envelope& conc) {
  return {{"rho_bar", conv.rho_bar},
          {"convex", conv.partition},
          {"concave", conc.partition},
          {"convex_shape", conv.shape_string()},
          {"concave_shape", conc.shape_string()}};
}

std::vector<std::pair<double, double>> read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open profile '" + path + "'");
  std::vector<std::pair<double, double>> out;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    double x = 0, u = 0;
    const char* end = line.data() + line.size();
    bool ok = comma != std::string::npos;
    if (ok) {
      const auto rx = std::from_chars(line.data(), line.data() + comma, x);
      const auto ru = std::from_chars(line.data() + comma + 1, end, u);
      ok = rx.ec == std::errc() && ru.ec == std::errc();
    }
    if (!ok) {
      if (row == 1) continue;  // header
      throw DomainError(path + ":" + std::to_string(row) + ": expected two numbers");
    }
    out.emplace_back(x, u);
  }
  if (out.size() < 2) throw DomainError(path + ": profile needs at least two rows");
  return out;
}

}  // namespace fundsol::app
