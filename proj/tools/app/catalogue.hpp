#pragma once

#include <string>
#include <vector>

#include "fundsol/flux.hpp"

namespace fundsol::app {

struct DemoFlux {
  std::string name;
  std::string formula;
  Flux flux;
};

/// "burgers", "cubic" and "eight_stage", in that order.
const std::vector<DemoFlux>& demo_catalogue();

/// Throws DomainError for an unknown name.
const DemoFlux& find_demo(const std::string& name);

/// Roots of f'' for the eight_stage flux; f is the second antiderivative of
/// the monic quintic with these roots.
const std::vector<double>& eight_stage_inflections();

}  // namespace fundsol::app
