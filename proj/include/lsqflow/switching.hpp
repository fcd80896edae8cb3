#pragma once

#include "lsqflow/graph.hpp"
#include "lsqflow/linear_problem.hpp"
#include "lsqflow/simulate.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace lsqflow {

/// Periodic signal: graph index = floor(t / period) mod graphs.size().
class SwitchingSignal {
 public:
  SwitchingSignal(double period, std::vector<Graph> graphs);

  [[nodiscard]] double period() const noexcept { return period_; }
  [[nodiscard]] const std::vector<Graph>& graphs() const noexcept { return graphs_; }
  [[nodiscard]] int n_nodes() const noexcept { return graphs_.front().n_nodes(); }
  [[nodiscard]] std::size_t active_index(double t) const;

 private:
  double period_;
  std::vector<Graph> graphs_;
};

/// RK4 on the active graph's flow. Requires step_h to divide the period and t_end to be
/// a whole number of periods, so every switch lands on a grid point.
Trajectory simulate_switching(const NetworkLinearEquation& problem, const SwitchingSignal& signal,
                              const Eigen::VectorXd& x0, const Eigen::VectorXd& v0, const CtConfig& config);

/// {base + span * k}. base = (I - W) v*, span orthonormal with range(span) = range(W).
struct LimitSet {
  Eigen::VectorXd base_point;
  Eigen::MatrixXd span_basis;

  [[nodiscard]] double distance_to(const Eigen::VectorXd& point) const;
  [[nodiscard]] bool contains(const Eigen::VectorXd& point, double tol = 1e-8) const;
};

LimitSet limit_set(const NetworkLinearEquation& problem, const Graph& graph);

struct IntersectionResult {
  bool intersect = false;
  double distance = 0.0;
};

IntersectionResult limit_sets_intersect(const LimitSet& a, const LimitSet& b);

/// sup of e(t) over the final tail_fraction of the samples.
double tail_sup_error(const Trajectory& traj, double tail_fraction = 0.2);

/// Lag in (0, max_lag] minimizing the normalized rms of e(t + lag) - e(t) over the final
/// tail_fraction of a uniformly sampled series, searched only beyond the first lag whose
/// score reaches half the maximum score.
double estimate_period(const std::vector<std::pair<double, double>>& series, double max_lag,
                       double tail_fraction = 0.5);

/// True when every Laplacian basis eigenvector of the graph has a support listed in
/// `allowed` (0-based, sorted) and the spectrum is simple.
bool matches_support_fingerprint(const Graph& graph, const std::vector<std::vector<int>>& allowed);

}  // namespace lsqflow
