#pragma once

#include "lsqflow/kernels.hpp"
#include "lsqflow/simulate.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace lsqflow::detail {

Sample make_sample(const AssembledFlow& flow, double t, const std::vector<double>& u);
std::vector<double> stack_state(const AssembledFlow& flow, const Eigen::VectorXd& x0, const Eigen::VectorXd& v0);
void validate_ct(double step_h, double t_end, int record_every);

// Runs `steps` fixed steps from u. step(k, u, h) advances u from grid index k.
// Time is k * h, never accumulated. A trailing partial step of length `tail`
// is taken after the last full step when tail > 0.
template <class Step>
void drive(const AssembledFlow& flow, std::vector<double>& u, double h, std::int64_t steps, double tail,
           int record_every, bool discrete, Trajectory& traj, Step&& step) {
  const auto& k = kernels::active();
  traj.samples.push_back(make_sample(flow, 0.0, u));
  for (std::int64_t i = 0; i < steps; ++i) {
    step(i, u.data(), h);
    const std::int64_t next = i + 1;
    const double t = discrete ? static_cast<double>(next) : static_cast<double>(next) * h;
    if (k.exceeds(u.data(), kDivergenceLimit, u.size())) {
      traj.divergence = Divergence{t, next};
      traj.samples.push_back(make_sample(flow, t, u));
      return;
    }
    if (next % record_every == 0 || (next == steps && tail <= 0.0)) traj.samples.push_back(make_sample(flow, t, u));
  }
  if (tail > 0.0) {
    step(steps, u.data(), tail);
    const double t = static_cast<double>(steps) * h + tail;
    if (k.exceeds(u.data(), kDivergenceLimit, u.size())) traj.divergence = Divergence{t, steps + 1};
    traj.samples.push_back(make_sample(flow, t, u));
  }
}

// Splits t_end into whole steps of h plus a remainder that is dropped when it is
// roundoff relative to h.
inline void split_horizon(double t_end, double h, std::int64_t& steps, double& tail) {
  const double ratio = t_end / h;
  const double whole = std::round(ratio);
  if (std::abs(ratio - whole) <= 1e-9 * std::max(1.0, whole)) {
    steps = static_cast<std::int64_t>(whole);
    tail = 0.0;
  } else {
    steps = static_cast<std::int64_t>(std::floor(ratio));
    tail = t_end - static_cast<double>(steps) * h;
  }
}

}  // namespace lsqflow::detail
