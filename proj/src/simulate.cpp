#include "lsqflow/simulate.hpp"

#include "drive.hpp"
#include "lsqflow/error.hpp"
#include "lsqflow/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lsqflow {

namespace detail {

Sample make_sample(const AssembledFlow& flow, double t, const std::vector<double>& u) {
  const int nm = flow.block_size();
  Sample s;
  s.t = t;
  s.x = Eigen::Map<const Eigen::VectorXd>(u.data(), nm);
  s.v = Eigen::Map<const Eigen::VectorXd>(u.data() + nm, nm);
  s.error = (s.x - flow.x_star()).squaredNorm();
  s.cost = cost(flow, s.x);
  return s;
}

std::vector<double> stack_state(const AssembledFlow& flow, const Eigen::VectorXd& x0, const Eigen::VectorXd& v0) {
  const int nm = flow.block_size();
  if (x0.size() != nm || v0.size() != nm) {
    throw Error(ErrorKind::DimensionMismatch, "initial state must have length Nm = " + std::to_string(nm));
  }
  if (!x0.allFinite() || !v0.allFinite()) throw Error(ErrorKind::InvalidArgument, "initial state must be finite");
  std::vector<double> u(2 * static_cast<std::size_t>(nm));
  std::copy(x0.data(), x0.data() + nm, u.begin());
  std::copy(v0.data(), v0.data() + nm, u.begin() + nm);
  return u;
}

void validate_ct(double step_h, double t_end, int record_every) {
  if (!(step_h > 0.0) || !std::isfinite(step_h)) throw Error(ErrorKind::InvalidArgument, "step_h must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error(ErrorKind::InvalidArgument, "t_end must be positive");
  if (record_every < 1) throw Error(ErrorKind::InvalidArgument, "record_every must be positive");
}

}  // namespace detail

namespace {

Trajectory run_affine(const AssembledFlow& flow, const Eigen::MatrixXd& a, const Eigen::VectorXd& x0,
                      const Eigen::VectorXd& v0, const CtConfig& config, std::string label) {
  detail::validate_ct(config.step_h, config.t_end, config.record_every);
  std::vector<double> u = detail::stack_state(flow, x0, v0);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * flow.block_size());
  b.head(flow.block_size()) = flow.z_h;
  AffineStepper stepper(a, b);

  Trajectory traj;
  traj.n_nodes = flow.n_nodes;
  traj.dim = flow.dim;
  traj.meta = {"rk4", config.step_h, std::move(label)};
  std::int64_t steps = 0;
  double tail = 0.0;
  detail::split_horizon(config.t_end, config.step_h, steps, tail);
  detail::drive(flow, u, config.step_h, steps, tail, config.record_every, false, traj,
                [&](std::int64_t, double* state, double h) { stepper.rk4(state, h); });
  return traj;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> ct_rhs(const AssembledFlow& flow, const FlowState& state) {
  const int n = flow.n_nodes;
  const int m = flow.dim;
  if (state.x.size() != flow.block_size() || state.v.size() != flow.block_size()) {
    throw Error(ErrorKind::DimensionMismatch, "state must have length Nm");
  }
  Eigen::VectorXd dx(n * m);
  Eigen::VectorXd dv(n * m);
  for (int i = 0; i < n; ++i) {
    const auto xi = state.x.segment(i * m, m);
    const auto vi = state.v.segment(i * m, m);
    const Eigen::VectorXd h = flow.rows.row(i).transpose();
    Eigen::VectorXd cx = -h * (h.dot(xi) - flow.obs(i));
    Eigen::VectorXd cv = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < n; ++j) {
      const double a = -flow.laplacian(i, j);
      if (j == i || a == 0.0) continue;
      cx -= a * (vi - state.v.segment(j * m, m));
      cv += a * (xi - state.x.segment(j * m, m));
    }
    dx.segment(i * m, m) = cx;
    dv.segment(i * m, m) = cv;
  }
  return {dx, dv};
}

Trajectory simulate_ct(const AssembledFlow& flow, const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                       const CtConfig& config) {
  return run_affine(flow, flow.system, x0, v0, config, "ct");
}

Trajectory simulate_wang_elia(const AssembledFlow& flow, double alpha, const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& v0, const CtConfig& config) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::InvalidArgument, "alpha must be non-negative");
  Eigen::MatrixXd a = flow.system;
  const int nm = flow.block_size();
  a.topLeftCorner(nm, nm) -= alpha * flow.l_kron;
  return run_affine(flow, a, x0, v0, config, "wang-elia");
}

Trajectory simulate_dt(const AssembledFlow& flow, const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                       const DiscreteConfig& config) {
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) {
    throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  }
  if (config.max_steps < 1) throw Error(ErrorKind::InvalidArgument, "max_steps must be positive");
  if (config.record_every < 1) throw Error(ErrorKind::InvalidArgument, "record_every must be positive");
  std::vector<double> u = detail::stack_state(flow, x0, v0);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * flow.block_size());
  b.head(flow.block_size()) = flow.z_h;
  AffineStepper stepper(flow.system, b);

  Trajectory traj;
  traj.n_nodes = flow.n_nodes;
  traj.dim = flow.dim;
  traj.discrete = true;
  traj.meta = {"euler", config.epsilon, "dt"};
  detail::drive(flow, u, config.epsilon, config.max_steps, 0.0, config.record_every, true, traj,
                [&](std::int64_t, double* state, double eps) { stepper.euler(state, eps); });
  return traj;
}

std::vector<std::pair<double, double>> error_trajectory(const Trajectory& traj, const Eigen::VectorXd& y_star) {
  if (traj.samples.empty()) throw Error(ErrorKind::InvalidArgument, "trajectory is empty");
  if (y_star.size() != traj.dim) throw Error(ErrorKind::DimensionMismatch, "y* has wrong dimension");
  const Eigen::VectorXd target = y_star.replicate(traj.n_nodes, 1);
  std::vector<std::pair<double, double>> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) out.emplace_back(s.t, (s.x - target).squaredNorm());
  return out;
}

double window_amplitude(const Trajectory& traj, int component, double lo, double hi) {
  if (component < 0 || component >= traj.block_size()) {
    throw Error(ErrorKind::InvalidArgument, "component out of range");
  }
  const auto n = static_cast<double>(traj.samples.size());
  const auto first = static_cast<std::size_t>(std::floor(lo * n));
  const auto last = std::min(traj.samples.size(), static_cast<std::size_t>(std::ceil(hi * n)));
  if (first >= last) return 0.0;
  double mn = traj.samples[first].x(component);
  double mx = mn;
  for (std::size_t i = first; i < last; ++i) {
    mn = std::min(mn, traj.samples[i].x(component));
    mx = std::max(mx, traj.samples[i].x(component));
  }
  return mx - mn;
}

bool oscillates(const Trajectory& traj, int component, const OscillationOptions& options) {
  const double tail = window_amplitude(traj, component, options.tail_lo, 1.0);
  const double mid = window_amplitude(traj, component, options.mid_lo, options.mid_hi);
  return tail > options.amplitude_floor && tail >= options.ratio * mid;
}

std::vector<int> diverged_components(const Trajectory& traj, double fraction) {
  std::vector<int> out;
  if (traj.samples.empty()) return out;
  const auto& x = traj.samples.back().x;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(std::abs(x(i)) <= fraction * kDivergenceLimit)) out.push_back(static_cast<int>(i));
  return out;
}

double lyapunov(const AssembledFlow& flow, const Eigen::VectorXd& v_star, const Eigen::VectorXd& x,
                const Eigen::VectorXd& v) {
  return 0.5 * ((x - flow.x_star()).squaredNorm() + (v - v_star).squaredNorm());
}

}  // namespace lsqflow
