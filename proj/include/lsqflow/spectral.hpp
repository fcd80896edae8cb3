#pragma once

#include "lsqflow/graph.hpp"
#include "lsqflow/linear_problem.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace lsqflow {

/// The network flow in stacked form: H~ = blkdiag(h_i h_i^T), z_H = [z_i h_i],
/// L (x) I_m, and the shifted-dynamics matrix M = [[-H~, -L(x)I], [L(x)I, 0]].
struct AssembledFlow {
  int n_nodes = 0;
  int dim = 0;
  Eigen::MatrixXd rows;  // H, N x m
  Eigen::VectorXd obs;   // z
  Eigen::MatrixXd laplacian;
  Eigen::MatrixXd h_tilde;
  Eigen::VectorXd z_h;
  Eigen::MatrixXd l_kron;
  Eigen::MatrixXd system;  // M
  Eigen::VectorXd y_star;  // least-squares solution; zero for the oscillator diagnostic
  bool oscillator_only = false;

  [[nodiscard]] int block_size() const noexcept { return n_nodes * dim; }
  /// 1 (x) y*.
  [[nodiscard]] Eigen::VectorXd x_star() const;
};

AssembledFlow assemble(const NetworkLinearEquation& problem, const Graph& graph);

/// Diagnostic flow with every row zeroed (H~ = 0, z_H = 0), leaving only the
/// oscillator x' = -(L(x)I)v, v' = (L(x)I)x. Bypasses the rank precondition.
AssembledFlow assemble_oscillator(const Graph& graph, int dim);

/// H~ x - z_H: the flow's gradient term, equal to grad(U/2) for U below.
Eigen::VectorXd gradient(const AssembledFlow& flow, const Eigen::VectorXd& x);
/// U(x) = sum_i (h_i^T x_i - z_i)^2.
double cost(const AssembledFlow& flow, const Eigen::VectorXd& x);

/// Relative threshold for classifying an eigenvalue of M as zero or as lying on the imaginary axis.
inline constexpr double kImagTolerance = 1e-7;

/// All 2Nm eigenvalues of M, sorted by (real, imag).
std::vector<std::complex<double>> m_spectrum(const AssembledFlow& flow);

/// Scale used for the relative zero test: max(1, max |lambda|).
double spectral_scale(std::span<const std::complex<double>> eigenvalues);
bool is_zero_mode(std::complex<double> lambda, double scale);
/// Nonzero with |Re| <= tau * |lambda|.
bool is_marginal_mode(std::complex<double> lambda, double scale);

enum class CheckMethod { SimpleSpectrum, MSpectrum, Both };
std::string_view to_string(CheckMethod method);

/// Certificate of failure: a Laplacian eigenvector alpha and a unit eta with
/// h_i^T eta = 0 on the support of alpha, so alpha (x) eta excites an
/// undamped mode at frequency laplacian_eigenvalue.
struct ConditionWitness {
  double laplacian_eigenvalue = 0.0;
  Eigen::VectorXd alpha;
  Eigen::VectorXd eta;
  std::vector<int> support;  // 0-based
  int span_dim = 0;          // dim span{h_i : i in support}
};

struct ConditionVerdict {
  bool holds = false;
  std::optional<ConditionWitness> witness;
  CheckMethod method = CheckMethod::MSpectrum;
};

/// Decides whether span{h_i : i in I_alpha} = R^m for every Laplacian eigenvector.
///  - SimpleSpectrum: rank test on each basis eigenvector; NotApplicable when an
///    eigenvalue is repeated.
///  - MSpectrum: checks that M has no nonzero eigenvalue on the imaginary axis.
///  - Both: runs MSpectrum and a support route (basis test on simple eigenvalues,
///    ker H~ on E (x) R^m for repeated ones); InternalInconsistency on disagreement.
ConditionVerdict check_condition(const NetworkLinearEquation& problem, const Graph& graph,
                                 CheckMethod method);

/// min over eigenvalues with nonzero real part of -2 Re(lambda) / |lambda|^2.
double epsilon_star(const AssembledFlow& flow);
double epsilon_star(std::span<const std::complex<double>> eigenvalues);

struct ZeroSpace {
  int dim = 0;
  Eigen::MatrixXd projector;  // W on the v-block, Nm x Nm
};

/// Biorthogonal projector onto the zero eigenspace of M restricted to the
/// v-block. Throws ConditionViolated when M has marginal modes.
ZeroSpace zero_space_projector(const AssembledFlow& flow);

/// Minimum-norm v* with (L(x)I) v* = z_H - H~ x*.
Eigen::VectorXd equilibrium_dual(const AssembledFlow& flow);

/// (I - W) v* + W v0.
Eigen::VectorXd predict_v_limit(const AssembledFlow& flow, const Eigen::VectorXd& v_star,
                                const Eigen::VectorXd& v0);

struct SpectralReport {
  std::vector<std::complex<double>> m_eigenvalues;
  std::optional<double> epsilon_star;
  int zero_space_dim = 0;
  std::optional<Eigen::MatrixXd> projector;
  ConditionVerdict verdict;
  LaplacianSpectrum laplacian_spectrum;
};

SpectralReport analyze(const NetworkLinearEquation& problem, const Graph& graph);

}  // namespace lsqflow
