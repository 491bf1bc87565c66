#include "catalogue.hpp"

#include "fundsol/errors.hpp"
#include "fundsol/polynomial.hpp"

namespace fundsol::app {

const std::vector<double>& eight_stage_inflections() {
  static const std::vector<double> roots = {-0.8, 0.2, 2.8, 5.3, 6.9};
  return roots;
}

const std::vector<DemoFlux>& demo_catalogue() {
  static const std::vector<DemoFlux> demos = [] {
    std::vector<DemoFlux> d;
    d.push_back({"burgers", "u^2/2", Flux::polynomial({0, 0, 0.5}, 20.0)});
    d.push_back({"cubic", "u^2 (2u - 3)/6", Flux::polynomial({0, 0, -0.5, 1.0 / 3.0}, 4.0)});
    const auto f = Polynomial::from_roots(eight_stage_inflections()).integral().integral();
    d.push_back({"eight_stage", "f'' = (u + 0.8)(u - 0.2)(u - 2.8)(u - 5.3)(u - 6.9), f(0) = f'(0) = 0",
                 Flux::polynomial(f.coeffs(), 13.0)});
    return d;
  }();
  return demos;
}

const DemoFlux& find_demo(const std::string& name) {
  for (const auto& d : demo_catalogue())
    if (d.name == name) return d;
  throw DomainError("unknown demo flux '" + name + "' (known: burgers, cubic, eight_stage)");
}

}  // namespace fundsol::app
