#pragma once

#include "lsqflow/kernels.hpp"

#include <Eigen/Dense>

#include <vector>

namespace lsqflow {

// Fixed-step integrator for du/dt = A u + b with u stored contiguously.
// Scratch buffers are owned, so one instance must not be shared across threads.
class AffineStepper {
 public:
  AffineStepper(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  void rk4(double* u, double h);
  // u <- u + eps (A u + b)
  void euler(double* u, double eps);

 private:
  std::size_t n_;
  std::vector<double> a_;  // row-major
  std::vector<double> b_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
  const kernels::KernelTable* k_;
};

}  // namespace lsqflow
