#pragma once

#include "lsqflow/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lsqflow {

struct FlowState {
  double t = 0.0;  // time, or step index for discrete runs
  Eigen::VectorXd x;
  Eigen::VectorXd v;
};

struct Sample {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd v;
  double error = 0.0;  // ||x - 1 (x) y*||^2
  double cost = 0.0;   // U(x)
};

struct Divergence {
  double at = 0.0;  // time or step index of the first offending state
  std::int64_t step = 0;
};

struct TrajectoryMeta {
  std::string integrator;  // "rk4" or "euler"
  double step = 0.0;       // h or epsilon
  std::string label;
};

struct Trajectory {
  int n_nodes = 0;
  int dim = 0;
  bool discrete = false;
  TrajectoryMeta meta;
  std::vector<Sample> samples;
  std::optional<Divergence> divergence;

  [[nodiscard]] bool diverged() const noexcept { return divergence.has_value(); }
  [[nodiscard]] int block_size() const noexcept { return n_nodes * dim; }
};

struct CtConfig {
  double step_h = 0.005;
  double t_end = 200.0;
  int record_every = 1;
};

struct DiscreteConfig {
  double epsilon = 0.0;
  std::int64_t max_steps = 40000;
  int record_every = 1;
};

/// Any component beyond this magnitude, or non-finite, marks a run as diverged.
inline constexpr double kDivergenceLimit = 1e9;

/// Per-node evaluation of the flow vector field:
///   dx_i = -sum_j a_ij (v_i - v_j) - h_i (h_i^T x_i - z_i),  dv_i = sum_j a_ij (x_i - x_j).
std::pair<Eigen::VectorXd, Eigen::VectorXd> ct_rhs(const AssembledFlow& flow, const FlowState& state);

Trajectory simulate_ct(const AssembledFlow& flow, const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                       const CtConfig& config = {});

/// x(k+1) = x - eps (L(x)I) v - eps grad U(x),  v(k+1) = v + eps (L(x)I) x.
Trajectory simulate_dt(const AssembledFlow& flow, const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                       const DiscreteConfig& config);

/// Adds the consensus damping -alpha (L(x)I) x to the primal equation. alpha = 0 is allowed
/// and reproduces simulate_ct exactly.
Trajectory simulate_wang_elia(const AssembledFlow& flow, double alpha, const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& v0, const CtConfig& config = {});

std::vector<std::pair<double, double>> error_trajectory(const Trajectory& traj, const Eigen::VectorXd& y_star);

/// max - min of x[component] over samples whose index lies in [lo, hi) * size.
double window_amplitude(const Trajectory& traj, int component, double lo, double hi);

struct OscillationOptions {
  double tail_lo = 0.8;
  double mid_lo = 0.4;
  double mid_hi = 0.6;
  double ratio = 0.5;
  /// Tail amplitudes below this are roundoff, never oscillation.
  double amplitude_floor = 1e-12;
};

bool oscillates(const Trajectory& traj, int component, const OscillationOptions& options = {});

/// x-components (0-based, flattened node-major) whose magnitude in the last sample exceeds
/// fraction * kDivergenceLimit.
std::vector<int> diverged_components(const Trajectory& traj, double fraction = 1e-3);

/// 1/2 (||x - x*||^2 + ||v - v*||^2).
double lyapunov(const AssembledFlow& flow, const Eigen::VectorXd& v_star, const Eigen::VectorXd& x,
                const Eigen::VectorXd& v);

/// Flattened index of x_node[comp], both 0-based.
inline int component_index(int node, int comp, int dim) { return node * dim + comp; }

}  // namespace lsqflow
