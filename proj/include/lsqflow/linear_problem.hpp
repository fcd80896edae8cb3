#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace lsqflow {

/// A linear equation z = H y whose rows are distributed over N network
/// nodes: node i holds the row h_i and the scalar observation z_i.
///
/// Construction enforces N > m and full column rank. Rank is decided from
/// the singular values with threshold sigma_max * max(N, m) * 1e-12.
class NetworkLinearEquation {
 public:
  NetworkLinearEquation(Eigen::MatrixXd rows, Eigen::VectorXd obs);

  [[nodiscard]] int n_nodes() const noexcept { return static_cast<int>(rows_.rows()); }
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(rows_.cols()); }

  /// The N x m matrix H, row i is h_i.
  [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return rows_; }
  [[nodiscard]] const Eigen::VectorXd& observations() const noexcept { return obs_; }
  [[nodiscard]] Eigen::VectorXd row(int i) const { return rows_.row(i).transpose(); }

 private:
  Eigen::MatrixXd rows_;
  Eigen::VectorXd obs_;
};

/// Numerical rank using the library-wide threshold sigma_max * max(r, c) * 1e-12.
int numerical_rank(const Eigen::MatrixXd& a);

struct LeastSquaresSolution {
  Eigen::VectorXd y_star;
  Eigen::VectorXd residual;  // H y* - z
  double objective = 0.0;    // ||residual||^2
};

/// Centralized least-squares solution via column-pivoted Householder QR.
LeastSquaresSolution solve_least_squares(const NetworkLinearEquation& problem);

/// h_i^T y - z_i for node index i (0-based). Throws InvalidNode when out of range.
double residual_component(const NetworkLinearEquation& problem, const Eigen::VectorXd& y_star,
                          int node);

/// The square system [[H, -I_N], [0, H^T]] ybar = [z; 0] whose unique solution is
/// [y*; e*] when H has full column rank.
struct AugmentedSystem {
  Eigen::MatrixXd h_bar;
  Eigen::VectorXd z_bar;
  int n_nodes = 0;
  int dim = 0;
};

AugmentedSystem build_state_expansion(const NetworkLinearEquation& problem);

/// Solves the augmented system with partially pivoted LU.
Eigen::VectorXd solve_augmented(const AugmentedSystem& system);

}  // namespace lsqflow
