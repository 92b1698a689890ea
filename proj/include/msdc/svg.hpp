#pragma once

#include <string>
#include <vector>

#include "msdc/sem.hpp"

namespace msdc::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

std::string render(const LinePlot& plot);

/// One heatmap panel of rho over (alpha, beta) for tau index `it`; stable
/// cells blue, unstable red, error cells grey.
std::string render_stability_panel(const StabilityGrid& grid, std::size_t it);

}  // namespace msdc::svg
