#include "lsqflow/io/plot.hpp"

#include "lsqflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace lsqflow::io {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr std::size_t kMaxPoints = 2000;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(const char* pattern, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double value(const Sample& s, const Series& series, int dim) {
  const int idx = series.node * dim + series.comp;
  switch (series.kind) {
    case Series::Kind::X: return s.x(idx);
    case Series::Kind::V: return s.v(idx);
    case Series::Kind::Error: return s.error;
  }
  return 0.0;
}

std::string series_name(const Series& s) {
  if (s.kind == Series::Kind::Error) return "e(t)";
  return std::string(s.kind == Series::Kind::X ? "x" : "v") + std::to_string(s.node + 1) + "[" +
         std::to_string(s.comp + 1) + "]";
}

Series parse_index(std::string_view tok, Series::Kind kind, int n_nodes, int dim) {
  const auto dot = tok.find('.');
  if (dot == std::string_view::npos) {
    throw Error(ErrorKind::InvalidArgument, "plot index '" + std::string(tok) + "' must look like node.component");
  }
  int node = 0;
  int comp = 0;
  try {
    std::size_t used = 0;
    node = std::stoi(std::string(tok.substr(0, dot)), &used);
    if (used != dot) throw std::invalid_argument("node");
    const std::string rest(tok.substr(dot + 1));
    comp = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("comp");
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "plot index '" + std::string(tok) + "' must look like node.component");
  }
  if (node < 1 || node > n_nodes || comp < 1 || comp > dim) {
    throw Error(ErrorKind::InvalidArgument, "plot index '" + std::string(tok) + "' is out of range");
  }
  return {kind, node - 1, comp - 1};
}

// Round the data range outward to a 1-2-5 grid.
double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r <= 1.0 ? 1.0 : r <= 2.0 ? 2.0 : r <= 5.0 ? 5.0 : 10.0) * mag;
}

}  // namespace

PlotSpec parse_plot_spec(std::string_view text, int n_nodes, int dim) {
  PlotSpec spec;
  Series::Kind kind = Series::Kind::X;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    std::string_view tok = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    pos = comma == std::string_view::npos ? text.size() + 1 : comma + 1;
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (tok.empty()) continue;
    if (tok == "error") {
      spec.series.push_back({Series::Kind::Error, 0, 0});
    } else if (tok == "x" || tok == "v") {
      kind = tok == "x" ? Series::Kind::X : Series::Kind::V;
      for (int i = 0; i < n_nodes; ++i)
        for (int c = 0; c < dim; ++c) spec.series.push_back({kind, i, c});
    } else if (tok.starts_with("x:") || tok.starts_with("v:")) {
      kind = tok[0] == 'x' ? Series::Kind::X : Series::Kind::V;
      spec.series.push_back(parse_index(tok.substr(2), kind, n_nodes, dim));
    } else {
      spec.series.push_back(parse_index(tok, kind, n_nodes, dim));
    }
  }
  if (spec.series.empty()) throw Error(ErrorKind::NothingToPlot, "plot selection is empty");
  const bool only_error = std::all_of(spec.series.begin(), spec.series.end(),
                                      [](const Series& s) { return s.kind == Series::Kind::Error; });
  spec.y_label = only_error ? "error" : "state";
  return spec;
}

std::string emit_plot(const Trajectory& traj, const PlotSpec& spec) {
  if (spec.series.empty()) throw Error(ErrorKind::NothingToPlot, "plot selection is empty");
  if (traj.samples.empty()) throw Error(ErrorKind::InvalidArgument, "trajectory is empty");
  for (const auto& s : spec.series)
    if (s.kind != Series::Kind::Error && (s.node < 0 || s.node >= traj.n_nodes || s.comp < 0 || s.comp >= traj.dim)) {
      throw Error(ErrorKind::InvalidArgument, "plot series " + series_name(s) + " is out of range");
    }

  const std::size_t n = traj.samples.size();
  const std::size_t stride = std::max<std::size_t>(1, (n + kMaxPoints - 1) / kMaxPoints);
  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < n; i += stride) picks.push_back(i);
  if (picks.back() != n - 1) picks.push_back(n - 1);

  double t0 = traj.samples.front().t;
  double t1 = traj.samples.back().t;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t i : picks)
    for (const auto& s : spec.series) {
      const double v = value(traj.samples[i], s, traj.dim);
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  if (!std::isfinite(lo)) {
    lo = -1.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    const double pad = std::max(1e-3, 0.05 * std::abs(hi));
    lo -= pad;
    hi += pad;
  }
  if (t1 <= t0) t1 = t0 + 1.0;
  const double ystep = nice_step(hi - lo);
  lo = std::floor(lo / ystep) * ystep;
  hi = std::ceil(hi / ystep) * ystep;
  const double xstep = nice_step(t1 - t0);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * pw; };
  auto py = [&](double v) { return kTop + (hi - v) / (hi - lo) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", kWidth) + "\" height=\"" +
         fmt("%.0f", kHeight) + "\" viewBox=\"0 0 " + fmt("%.0f", kWidth) + " " + fmt("%.0f", kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    svg += "<text x=\"" + fmt("%.1f", kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(spec.title) + "</text>\n";
  }
  svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double t = std::ceil(t0 / xstep) * xstep; t <= t1 + 1e-9 * xstep; t += xstep) {
    const double x = px(t);
    svg += "<line x1=\"" + fmt("%.2f", x) + "\" y1=\"" + fmt("%.2f", kTop) + "\" x2=\"" + fmt("%.2f", x) +
           "\" y2=\"" + fmt("%.2f", kTop + ph) + "\" stroke=\"#e5e5e5\"/>\n";
    svg += "<text x=\"" + fmt("%.2f", x) + "\" y=\"" + fmt("%.2f", kTop + ph + 16) + "\" text-anchor=\"middle\">" +
           fmt("%g", t) + "</text>\n";
  }
  for (double v = lo; v <= hi + 1e-9 * ystep; v += ystep) {
    const double y = py(v);
    svg += "<line x1=\"" + fmt("%.2f", kLeft) + "\" y1=\"" + fmt("%.2f", y) + "\" x2=\"" + fmt("%.2f", kLeft + pw) +
           "\" y2=\"" + fmt("%.2f", y) + "\" stroke=\"#e5e5e5\"/>\n";
    svg += "<text x=\"" + fmt("%.2f", kLeft - 6) + "\" y=\"" + fmt("%.2f", y + 4) + "\" text-anchor=\"end\">" +
           fmt("%.4g", std::abs(v) < 1e-12 * ystep ? 0.0 : v) + "</text>\n";
  }
  svg += "<rect x=\"" + fmt("%.2f", kLeft) + "\" y=\"" + fmt("%.2f", kTop) + "\" width=\"" + fmt("%.2f", pw) +
         "\" height=\"" + fmt("%.2f", ph) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  svg += "<text x=\"" + fmt("%.2f", kLeft + pw / 2) + "\" y=\"" + fmt("%.2f", kHeight - 12) +
         "\" text-anchor=\"middle\">" + escape(spec.x_label) + "</text>\n";
  svg += "<text transform=\"translate(16," + fmt("%.2f", kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(spec.y_label) + "</text>\n";
  svg += "</g>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.2\" points=\"";
    bool first = true;
    for (std::size_t i : picks) {
      const double v = value(traj.samples[i], s, traj.dim);
      if (!std::isfinite(v)) continue;
      if (!first) svg += ' ';
      first = false;
      svg += fmt("%.2f", px(traj.samples[i].t)) + "," + fmt("%.2f", py(std::clamp(v, lo, hi)));
    }
    svg += "\"><title>" + escape(series_name(s)) + "</title></polyline>\n";
  }

  svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  const std::size_t legend_rows = std::min<std::size_t>(spec.series.size(), 24);
  for (std::size_t k = 0; k < legend_rows; ++k) {
    const double y = kTop + 8 + 16.0 * static_cast<double>(k);
    const double x = kLeft + pw + 14;
    svg += "<line x1=\"" + fmt("%.2f", x) + "\" y1=\"" + fmt("%.2f", y) + "\" x2=\"" + fmt("%.2f", x + 20) +
           "\" y2=\"" + fmt("%.2f", y) + "\" stroke=\"" + kPalette[k % std::size(kPalette)] + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt("%.2f", x + 26) + "\" y=\"" + fmt("%.2f", y + 4) + "\">" +
           escape(series_name(spec.series[k])) + "</text>\n";
  }
  if (spec.series.size() > legend_rows) {
    svg += "<text x=\"" + fmt("%.2f", kLeft + pw + 14) + "\" y=\"" +
           fmt("%.2f", kTop + 8 + 16.0 * static_cast<double>(legend_rows) + 4) + "\">+" +
           std::to_string(spec.series.size() - legend_rows) + " more</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace lsqflow::io
