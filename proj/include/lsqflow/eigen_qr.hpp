#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace lsqflow::linalg {

/// All eigenvalues of a real square matrix: diagonal balancing, Householder
/// reduction to upper Hessenberg form, then Francis double-shift QR.
/// Complex eigenvalues are returned as exact conjugate pairs. The result is
/// sorted by (real, imag). Throws NumericalFailure if QR does not converge.
std::vector<std::complex<double>> nonsymmetric_eigenvalues(const Eigen::MatrixXd& a);

/// Reduces a in place to upper Hessenberg form by orthogonal similarity.
void reduce_to_hessenberg(Eigen::MatrixXd& a);

}  // namespace lsqflow::linalg
