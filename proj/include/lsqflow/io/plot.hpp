#pragma once

#include "lsqflow/simulate.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace lsqflow::io {

struct Series {
  enum class Kind { X, V, Error } kind = Kind::X;
  int node = 0;  // 0-based
  int comp = 0;  // 0-based
  friend bool operator==(const Series&, const Series&) = default;
};

struct PlotSpec {
  std::vector<Series> series;
  std::string x_label = "t";
  std::string y_label = "value";
  std::string title;
};

/// Comma-separated tokens: "x", "v" (all components), "error", "x:i.j", "v:i.j",
/// or a bare "i.j" that reuses the preceding kind. Indices are 1-based.
PlotSpec parse_plot_spec(std::string_view text, int n_nodes, int dim);

/// Self-contained SVG, one polyline per series. Identical inputs give identical bytes.
std::string emit_plot(const Trajectory& traj, const PlotSpec& spec);

}  // namespace lsqflow::io
