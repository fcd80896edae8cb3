#include "lsqflow/linear_problem.hpp"

#include "lsqflow/error.hpp"

#include <algorithm>
#include <string>

namespace lsqflow {

namespace {

constexpr double kRankTolerance = 1e-12;

double rank_threshold(const Eigen::MatrixXd& a, double sigma_max) {
  return sigma_max * static_cast<double>(std::max(a.rows(), a.cols())) * kRankTolerance;
}

}  // namespace

int numerical_rank(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double tol = rank_threshold(a, s(0));
  return static_cast<int>((s.array() > tol).count());
}

NetworkLinearEquation::NetworkLinearEquation(Eigen::MatrixXd rows, Eigen::VectorXd obs)
    : rows_(std::move(rows)), obs_(std::move(obs)) {
  if (rows_.rows() == 0 || rows_.cols() == 0) {
    throw Error(ErrorKind::InvalidArgument, "H must be non-empty");
  }
  if (obs_.size() != rows_.rows()) {
    throw Error(ErrorKind::DimensionMismatch,
                "z has " + std::to_string(obs_.size()) + " entries but H has " +
                    std::to_string(rows_.rows()) + " rows");
  }
  if (!rows_.allFinite() || !obs_.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "H and z must be finite");
  }
  if (rows_.rows() <= rows_.cols()) {
    throw Error(ErrorKind::InvalidArgument,
                "need more nodes than unknowns (N=" + std::to_string(rows_.rows()) +
                    ", m=" + std::to_string(rows_.cols()) + ")");
  }
  const int rank = numerical_rank(rows_);
  if (rank < rows_.cols()) throw RankDeficientError(rank, static_cast<int>(rows_.cols()));
}

LeastSquaresSolution solve_least_squares(const NetworkLinearEquation& problem) {
  const Eigen::MatrixXd& h = problem.matrix();
  const Eigen::VectorXd& z = problem.observations();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(h);
  qr.setThreshold(static_cast<double>(std::max(h.rows(), h.cols())) * kRankTolerance);
  if (qr.rank() < h.cols()) throw RankDeficientError(static_cast<int>(qr.rank()), problem.dim());

  LeastSquaresSolution out;
  out.y_star = qr.solve(z);
  out.residual = h * out.y_star - z;
  out.objective = out.residual.squaredNorm();
  return out;
}

double residual_component(const NetworkLinearEquation& problem, const Eigen::VectorXd& y_star,
                          int node) {
  if (node < 0 || node >= problem.n_nodes()) {
    throw Error(ErrorKind::InvalidNode, "node index " + std::to_string(node + 1) +
                                            " outside 1.." + std::to_string(problem.n_nodes()));
  }
  if (y_star.size() != problem.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "y* has wrong dimension");
  }
  return problem.matrix().row(node).dot(y_star) - problem.observations()(node);
}

AugmentedSystem build_state_expansion(const NetworkLinearEquation& problem) {
  const int n = problem.n_nodes();
  const int m = problem.dim();
  AugmentedSystem sys;
  sys.n_nodes = n;
  sys.dim = m;
  sys.h_bar = Eigen::MatrixXd::Zero(n + m, m + n);
  sys.h_bar.topLeftCorner(n, m) = problem.matrix();
  sys.h_bar.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  sys.h_bar.bottomRightCorner(m, n) = problem.matrix().transpose();
  sys.z_bar = Eigen::VectorXd::Zero(n + m);
  sys.z_bar.head(n) = problem.observations();
  return sys;
}

Eigen::VectorXd solve_augmented(const AugmentedSystem& system) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.h_bar);
  Eigen::VectorXd sol = lu.solve(system.z_bar);
  if (!sol.allFinite()) throw Error(ErrorKind::NumericalFailure, "augmented system is singular");
  return sol;
}

}  // namespace lsqflow
