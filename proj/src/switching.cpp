#include "lsqflow/switching.hpp"

#include "drive.hpp"
#include "lsqflow/error.hpp"
#include "lsqflow/spectral.hpp"
#include "lsqflow/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lsqflow {

namespace {

std::int64_t whole_multiple(double value, double unit, double tol, const char* what) {
  const double ratio = value / unit;
  const double k = std::round(ratio);
  if (k < 1.0 || std::abs(value - k * unit) > tol * std::max(1.0, std::abs(value))) {
    throw Error(ErrorKind::StepAlignment, what);
  }
  return static_cast<std::int64_t>(k);
}

}  // namespace

SwitchingSignal::SwitchingSignal(double period, std::vector<Graph> graphs)
    : period_(period), graphs_(std::move(graphs)) {
  if (!(period_ > 0.0) || !std::isfinite(period_)) throw Error(ErrorKind::InvalidArgument, "period must be positive");
  if (graphs_.empty()) throw Error(ErrorKind::InvalidArgument, "switching signal needs at least one graph");
  for (const auto& g : graphs_)
    if (g.n_nodes() != graphs_.front().n_nodes()) {
      throw Error(ErrorKind::DimensionMismatch, "all graphs of a switching signal must share the node set");
    }
}

std::size_t SwitchingSignal::active_index(double t) const {
  const auto k = static_cast<std::int64_t>(std::floor(t / period_));
  const auto n = static_cast<std::int64_t>(graphs_.size());
  return static_cast<std::size_t>(((k % n) + n) % n);
}

Trajectory simulate_switching(const NetworkLinearEquation& problem, const SwitchingSignal& signal,
                              const Eigen::VectorXd& x0, const Eigen::VectorXd& v0, const CtConfig& config) {
  detail::validate_ct(config.step_h, config.t_end, config.record_every);
  const std::int64_t per_period = whole_multiple(signal.period(), config.step_h, 1e-12, "step_h must divide period_T");
  const std::int64_t periods = whole_multiple(config.t_end, signal.period(), 1e-9, "t_end must be a multiple of period_T");

  std::vector<AssembledFlow> flows;
  std::vector<AffineStepper> steppers;
  flows.reserve(signal.graphs().size());
  steppers.reserve(signal.graphs().size());
  for (const auto& g : signal.graphs()) {
    flows.push_back(assemble(problem, g));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * flows.back().block_size());
    b.head(flows.back().block_size()) = flows.back().z_h;
    steppers.emplace_back(flows.back().system, b);
  }

  const AssembledFlow& reference = flows.front();
  std::vector<double> u = detail::stack_state(reference, x0, v0);
  Trajectory traj;
  traj.n_nodes = reference.n_nodes;
  traj.dim = reference.dim;
  traj.meta = {"rk4", config.step_h, "switching"};
  const auto count = static_cast<std::int64_t>(steppers.size());
  detail::drive(reference, u, config.step_h, per_period * periods, 0.0, config.record_every, false, traj,
                [&](std::int64_t k, double* state, double h) {
                  steppers[static_cast<std::size_t>((k / per_period) % count)].rk4(state, h);
                });
  return traj;
}

double LimitSet::distance_to(const Eigen::VectorXd& point) const {
  const Eigen::VectorXd d = point - base_point;
  return (d - span_basis * (span_basis.transpose() * d)).norm();
}

bool LimitSet::contains(const Eigen::VectorXd& point, double tol) const {
  return distance_to(point) <= tol * (1.0 + point.norm());
}

LimitSet limit_set(const NetworkLinearEquation& problem, const Graph& graph) {
  const AssembledFlow flow = assemble(problem, graph);
  const ZeroSpace zs = zero_space_projector(flow);
  const Eigen::VectorXd v_star = equilibrium_dual(flow);
  LimitSet out;
  out.base_point = v_star - zs.projector * v_star;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(zs.projector, Eigen::ComputeThinU);
  out.span_basis = svd.matrixU().leftCols(zs.dim);
  return out;
}

IntersectionResult limit_sets_intersect(const LimitSet& a, const LimitSet& b) {
  if (a.base_point.size() != b.base_point.size()) {
    throw Error(ErrorKind::DimensionMismatch, "limit sets live in different spaces");
  }
  const Eigen::Index n = a.base_point.size();
  Eigen::MatrixXd s(n, a.span_basis.cols() + b.span_basis.cols());
  s << a.span_basis, -b.span_basis;
  const Eigen::VectorXd delta = b.base_point - a.base_point;
  const Eigen::VectorXd coeff = s.completeOrthogonalDecomposition().solve(delta);
  const double residual = (s * coeff - delta).norm();
  IntersectionResult r;
  r.intersect = residual <= 1e-6 * (1.0 + delta.norm());
  r.distance = r.intersect ? 0.0 : residual;
  return r;
}

double tail_sup_error(const Trajectory& traj, double tail_fraction) {
  if (traj.samples.empty()) throw Error(ErrorKind::InvalidArgument, "trajectory is empty");
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "tail_fraction must lie in (0, 1)");
  }
  const auto n = traj.samples.size();
  const auto first = std::min(n - 1, static_cast<std::size_t>(std::floor((1.0 - tail_fraction) * static_cast<double>(n))));
  double sup = 0.0;
  for (std::size_t i = first; i < n; ++i) sup = std::max(sup, traj.samples[i].error);
  return sup;
}

double estimate_period(const std::vector<std::pair<double, double>>& series, double max_lag, double tail_fraction) {
  if (series.size() < 4) throw Error(ErrorKind::InvalidArgument, "series too short for period estimation");
  const double dt = series[1].first - series[0].first;
  const auto n = series.size();
  const auto first = static_cast<std::size_t>(std::floor((1.0 - tail_fraction) * static_cast<double>(n)));
  const std::size_t len = n - first;
  const auto max_k = std::min(len - 2, static_cast<std::size_t>(std::floor(max_lag / dt + 1e-9)));
  if (max_k < 1) throw Error(ErrorKind::InvalidArgument, "max_lag shorter than one sample");

  double mean = 0.0;
  for (std::size_t i = first; i < n; ++i) mean += series[i].second;
  mean /= static_cast<double>(len);
  double var = 0.0;
  for (std::size_t i = first; i < n; ++i) var += (series[i].second - mean) * (series[i].second - mean);
  var /= static_cast<double>(len);
  if (var <= 0.0) throw Error(ErrorKind::InvalidArgument, "series is constant over the tail");

  std::vector<double> score(max_k + 1, 0.0);
  for (std::size_t k = 1; k <= max_k; ++k) {
    double acc = 0.0;
    for (std::size_t i = first; i + k < n; ++i) {
      const double d = series[i + k].second - series[i].second;
      acc += d * d;
    }
    score[k] = std::sqrt(acc / static_cast<double>(len - k) / var);
  }
  // Small lags score near zero on any smooth, finely sampled signal. Only lags past
  // the point where the score first reaches half its peak are period candidates.
  const double peak = *std::max_element(score.begin() + 1, score.end());
  std::size_t start = 1;
  while (start < max_k && score[start] < 0.5 * peak) ++start;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = start;
  for (std::size_t k = start; k <= max_k; ++k) {
    if (score[k] < best) {
      best = score[k];
      best_k = k;
    }
  }
  return static_cast<double>(best_k) * dt;
}

bool matches_support_fingerprint(const Graph& graph, const std::vector<std::vector<int>>& allowed) {
  const LaplacianSpectrum spec = spectrum(laplacian(graph));
  if (!spec.simple()) return false;
  for (Eigen::Index k = 0; k < spec.eigenvectors.cols(); ++k) {
    const std::vector<int> s = support_of(spec.eigenvectors.col(k));
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) return false;
  }
  return true;
}

}  // namespace lsqflow
