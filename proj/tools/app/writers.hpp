#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fundsol/envelope.hpp"
#include "fundsol/evolution.hpp"
#include "fundsol/weno.hpp"

namespace fundsol::app {

/// Shortest text that reads back to the same double.
std::string number_text(double v);

/// Collects output files under one directory and remembers their names for
/// the manifest.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  std::filesystem::path path(const std::string& name);
  void write_text(const std::string& name, const std::string& text);
  void write_json(const std::string& name, const nlohmann::json& j);
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

/// Events with x in the coordinates of the original law.
nlohmann::json events_json(const Timeline& tl);
/// Rows shock_id,t,x,type.
std::string shocks_csv(const Timeline& tl);
/// Rows t,rho_bar,mass_error,genuine,single_sided.
std::string steps_csv(const Timeline& tl);
std::string profile_csv(const std::vector<std::pair<double, double>>& profile);
/// Grid cells are in the coordinates of the original law already.
std::string grid_csv(const GridSolution& g, const GridSnapshot& s);

nlohmann::json catalogue_json(const CriticalLevelCatalogue& cat);
nlohmann::json partition_json(const Envelope& conv, const Envelope& conc);

/// Profile (x, u) read back from a two-column CSV with an optional header.
std::vector<std::pair<double, double>> read_profile_csv(const std::string& path);

}  // namespace fundsol::app
