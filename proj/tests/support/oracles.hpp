#pragma once

// Independent reference computations for cross-checking the library. Nothing
// here calls the library routine it is used to check.

#include "lsqflow/graph.hpp"
#include "lsqflow/linear_problem.hpp"

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <vector>

namespace oracle {

// (H^T H) y = H^T z by hand-rolled Gaussian elimination with partial pivoting.
Eigen::VectorXd normal_equations_solve(const Eigen::MatrixXd& h, const Eigen::VectorXd& z);

// Dense solve of a square system by Gaussian elimination with partial pivoting.
Eigen::VectorXd gauss_solve(Eigen::MatrixXd a, Eigen::VectorXd b);

// M built entry by entry from the edge list and rows.
Eigen::MatrixXd system_matrix(const Eigen::MatrixXd& h, const lsqflow::Graph& g);

// Eigen::EigenSolver based eigenvalues, for comparison with the authored QR.
std::vector<std::complex<double>> reference_eigenvalues(const Eigen::MatrixXd& a);

// min over Re != 0 of -2 Re / |lambda|^2, from reference eigenvalues.
double epsilon_star_reference(const Eigen::MatrixXd& m, double tol = 1e-7);

// Per-node right-hand side of the flow written from the edge list.
void node_rhs(const Eigen::MatrixXd& h, const Eigen::VectorXd& z, const lsqflow::Graph& g, double alpha,
              const Eigen::VectorXd& x, const Eigen::VectorXd& v, Eigen::VectorXd& dx, Eigen::VectorXd& dv);

// Classical RK4 on node_rhs, with plain Eigen vector arithmetic.
void rk4_reference(const Eigen::MatrixXd& h, const Eigen::VectorXd& z, const lsqflow::Graph& g, double alpha,
                   Eigen::VectorXd& x, Eigen::VectorXd& v, double step, long steps);

// The discrete iteration in its per-node form.
void euler_reference(const Eigen::MatrixXd& h, const Eigen::VectorXd& z, const lsqflow::Graph& g,
                     Eigen::VectorXd& x, Eigen::VectorXd& v, double eps, long steps);

lsqflow::Graph random_connected_graph(int n, std::mt19937_64& rng, double extra_edge_prob = 0.3);

// Gaussian N x m matrix.
Eigen::MatrixXd gaussian(int rows, int cols, std::mt19937_64& rng);

}  // namespace oracle
