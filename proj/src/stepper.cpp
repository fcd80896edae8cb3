#include "lsqflow/stepper.hpp"

namespace lsqflow {

AffineStepper::AffineStepper(const Eigen::MatrixXd& a, const Eigen::VectorXd& b)
    : n_(static_cast<std::size_t>(b.size())),
      a_(n_ * n_),
      b_(b.data(), b.data() + b.size()),
      k1_(n_), k2_(n_), k3_(n_), k4_(n_), tmp_(n_),
      k_(&kernels::active()) {
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      a_.data(), a.rows(), a.cols()) = a;
}

void AffineStepper::rk4(double* u, double h) {
  const auto& k = *k_;
  k.affine_gemv(a_.data(), u, b_.data(), k1_.data(), n_);
  k.axpy_into(u, k1_.data(), 0.5 * h, tmp_.data(), n_);
  k.affine_gemv(a_.data(), tmp_.data(), b_.data(), k2_.data(), n_);
  k.axpy_into(u, k2_.data(), 0.5 * h, tmp_.data(), n_);
  k.affine_gemv(a_.data(), tmp_.data(), b_.data(), k3_.data(), n_);
  k.axpy_into(u, k3_.data(), h, tmp_.data(), n_);
  k.affine_gemv(a_.data(), tmp_.data(), b_.data(), k4_.data(), n_);
  k.rk4_combine(u, k1_.data(), k2_.data(), k3_.data(), k4_.data(), h, n_);
}

void AffineStepper::euler(double* u, double eps) {
  k_->affine_gemv(a_.data(), u, b_.data(), k1_.data(), n_);
  k_->axpy_into(u, k1_.data(), eps, u, n_);
}

}  // namespace lsqflow
