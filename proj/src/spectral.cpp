#include "lsqflow/spectral.hpp"

#include "lsqflow/eigen_qr.hpp"
#include "lsqflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lsqflow {

namespace {

// Singular values <= kKernelTolerance * sigma_max span the kernel of M.
constexpr double kKernelTolerance = 1e-9;
constexpr double kWitnessTolerance = 1e-8;

// A (x) I_m.
Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& a, int m) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows() * m, a.cols() * m);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0)
        for (int k = 0; k < m; ++k) out(i * m + k, j * m + k) = a(i, j);
  return out;
}

AssembledFlow assemble_blocks(Eigen::MatrixXd rows, Eigen::VectorXd obs, const Graph& graph) {
  AssembledFlow flow;
  flow.n_nodes = graph.n_nodes();
  flow.dim = static_cast<int>(rows.cols());
  flow.rows = std::move(rows);
  flow.obs = std::move(obs);
  flow.laplacian = laplacian(graph);

  const int n = flow.n_nodes;
  const int m = flow.dim;
  const int nm = n * m;
  flow.h_tilde = Eigen::MatrixXd::Zero(nm, nm);
  flow.z_h = Eigen::VectorXd::Zero(nm);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd h = flow.rows.row(i).transpose();
    flow.h_tilde.block(i * m, i * m, m, m) = h * h.transpose();
    flow.z_h.segment(i * m, m) = flow.obs(i) * h;
  }
  flow.l_kron = kron_identity(flow.laplacian, m);
  flow.system = Eigen::MatrixXd::Zero(2 * nm, 2 * nm);
  flow.system.topLeftCorner(nm, nm) = -flow.h_tilde;
  flow.system.topRightCorner(nm, nm) = -flow.l_kron;
  flow.system.bottomLeftCorner(nm, nm) = flow.l_kron;
  return flow;
}

bool has_marginal_modes(std::span<const std::complex<double>> eig) {
  const double scale = spectral_scale(eig);
  return std::any_of(eig.begin(), eig.end(), [&](auto l) { return is_marginal_mode(l, scale); });
}

ConditionWitness witness_from(double lambda, const Eigen::VectorXd& alpha, const Eigen::MatrixXd& rows) {
  ConditionWitness w;
  w.laplacian_eigenvalue = lambda;
  w.alpha = alpha;
  w.support = support_of(alpha);
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(w.support.size()), rows.cols());
  for (std::size_t k = 0; k < w.support.size(); ++k) stacked.row(static_cast<Eigen::Index>(k)) = rows.row(w.support[k]);
  w.span_dim = numerical_rank(stacked);
  if (stacked.rows() == 0) {
    w.eta = Eigen::VectorXd::Unit(rows.cols(), 0);
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
    w.eta = svd.matrixV().col(rows.cols() - 1);
  }
  return w;
}

bool witness_valid(const ConditionWitness& w, const Eigen::MatrixXd& rows) {
  if (w.span_dim >= rows.cols()) return false;
  const double scale = std::max(1.0, rows.cwiseAbs().maxCoeff());
  for (int i : w.support)
    if (std::abs(rows.row(i).dot(w.eta)) > kWitnessTolerance * scale) return false;
  return true;
}

// Every alpha in range(q) vanishing where h_i^T eta != 0 pairs with eta. A fixed
// generic combination of that subspace has the widest support.
Eigen::VectorXd widest_alpha(const Eigen::MatrixXd& q, const Eigen::MatrixXd& rows, const Eigen::VectorXd& eta,
                             const Eigen::VectorXd& fallback) {
  const double scale = std::max(1.0, rows.cwiseAbs().maxCoeff());
  std::vector<int> active;
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    if (std::abs(rows.row(i).dot(eta)) > kWitnessTolerance * scale) active.push_back(static_cast<int>(i));
  Eigen::MatrixXd basis = q;
  if (!active.empty()) {
    Eigen::MatrixXd pinned(static_cast<Eigen::Index>(active.size()), q.cols());
    for (std::size_t k = 0; k < active.size(); ++k) pinned.row(static_cast<Eigen::Index>(k)) = q.row(active[k]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(pinned);
    lu.setThreshold(1e-10);
    basis = q * lu.kernel();
  }
  Eigen::VectorXd weights(basis.cols());
  for (Eigen::Index k = 0; k < basis.cols(); ++k) weights(k) = 1.0 / std::sqrt(2.0 + static_cast<double>(k));
  Eigen::VectorXd alpha = basis * weights;
  const double norm = alpha.norm();
  return norm > 1e-12 ? Eigen::VectorXd(alpha / norm) : fallback;
}

struct EigenspaceProbe {
  bool kernel_nonempty = false;
  std::optional<ConditionWitness> witness;
};

// M has the eigenvalue i*r exactly when H~ vanishes on some nonzero member of
// E_r (x) R^m. A rank-one member alpha (x) eta of that kernel is a certificate.
EigenspaceProbe probe_eigenspace(const AssembledFlow& flow, const Eigen::MatrixXd& q, double lambda) {
  const int n = flow.n_nodes;
  const int m = flow.dim;
  const Eigen::MatrixXd qk = kron_identity(q, m);
  const Eigen::MatrixXd restricted = flow.h_tilde * qk;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(restricted, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double tol = kKernelTolerance * std::max(1.0, flow.h_tilde.cwiseAbs().maxCoeff());
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > tol) ++rank;

  EigenspaceProbe probe;
  probe.kernel_nonempty = rank < restricted.cols();
  for (Eigen::Index k = rank; k < restricted.cols(); ++k) {
    const Eigen::VectorXd beta = qk * svd.matrixV().col(k);
    Eigen::MatrixXd blocks(n, m);
    for (int i = 0; i < n; ++i) blocks.row(i) = beta.segment(i * m, m).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(blocks, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& bs = bsvd.singularValues();
    if (bs.size() > 1 && bs(1) > 1e-8 * bs(0)) continue;
    ConditionWitness w = witness_from(lambda, widest_alpha(q, flow.rows, bsvd.matrixV().col(0), bsvd.matrixU().col(0)), flow.rows);
    if (witness_valid(w, flow.rows)) {
      probe.witness = std::move(w);
      break;
    }
  }
  return probe;
}

ConditionVerdict check_support(const AssembledFlow& flow, const LaplacianSpectrum& spec) {
  ConditionVerdict v;
  v.method = CheckMethod::SimpleSpectrum;
  v.holds = true;
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const double lambda = spec.group_value(g);
    if (spec.groups[g].size() == 1) {
      ConditionWitness w = witness_from(lambda, spec.eigenvectors.col(spec.groups[g].front()), flow.rows);
      if (w.span_dim < flow.dim) {
        v.holds = false;
        v.witness = std::move(w);
        return v;
      }
    } else if (lambda > spec.group_tolerance) {
      EigenspaceProbe probe = probe_eigenspace(flow, spec.eigenspace(g), lambda);
      if (probe.kernel_nonempty) {
        v.holds = false;
        v.witness = std::move(probe.witness);
        return v;
      }
    }
  }
  return v;
}

ConditionVerdict check_m_spectrum(const AssembledFlow& flow, const LaplacianSpectrum& spec) {
  ConditionVerdict v;
  v.method = CheckMethod::MSpectrum;
  v.holds = !has_marginal_modes(m_spectrum(flow));
  for (std::size_t g = 0; !v.holds && !v.witness && g < spec.groups.size(); ++g) {
    const double lambda = spec.group_value(g);
    if (lambda <= spec.group_tolerance) continue;
    v.witness = probe_eigenspace(flow, spec.eigenspace(g), lambda).witness;
  }
  return v;
}

void require_connected_match(const NetworkLinearEquation& problem, const Graph& graph) {
  if (problem.n_nodes() != graph.n_nodes()) {
    throw Error(ErrorKind::DimensionMismatch, "problem has " + std::to_string(problem.n_nodes()) +
                                                  " nodes but graph has " + std::to_string(graph.n_nodes()));
  }
  if (!graph.is_connected()) throw Error(ErrorKind::InvalidArgument, "graph must be connected");
}

}  // namespace

Eigen::VectorXd AssembledFlow::x_star() const { return y_star.replicate(n_nodes, 1); }

AssembledFlow assemble(const NetworkLinearEquation& problem, const Graph& graph) {
  require_connected_match(problem, graph);
  AssembledFlow flow = assemble_blocks(problem.matrix(), problem.observations(), graph);
  flow.y_star = solve_least_squares(problem).y_star;
  return flow;
}

AssembledFlow assemble_oscillator(const Graph& graph, int dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  AssembledFlow flow = assemble_blocks(Eigen::MatrixXd::Zero(graph.n_nodes(), dim),
                                       Eigen::VectorXd::Zero(graph.n_nodes()), graph);
  flow.y_star = Eigen::VectorXd::Zero(dim);
  flow.oscillator_only = true;
  return flow;
}

Eigen::VectorXd gradient(const AssembledFlow& flow, const Eigen::VectorXd& x) {
  return flow.h_tilde * x - flow.z_h;
}

double cost(const AssembledFlow& flow, const Eigen::VectorXd& x) {
  double u = 0.0;
  for (int i = 0; i < flow.n_nodes; ++i) {
    const double r = flow.rows.row(i).dot(x.segment(i * flow.dim, flow.dim)) - flow.obs(i);
    u += r * r;
  }
  return u;
}

std::vector<std::complex<double>> m_spectrum(const AssembledFlow& flow) {
  return linalg::nonsymmetric_eigenvalues(flow.system);
}

double spectral_scale(std::span<const std::complex<double>> eigenvalues) {
  double s = 1.0;
  for (auto l : eigenvalues) s = std::max(s, std::abs(l));
  return s;
}

bool is_zero_mode(std::complex<double> lambda, double scale) {
  return std::abs(lambda) <= kImagTolerance * scale;
}

bool is_marginal_mode(std::complex<double> lambda, double scale) {
  return !is_zero_mode(lambda, scale) && std::abs(lambda.real()) <= kImagTolerance * std::abs(lambda);
}

std::string_view to_string(CheckMethod method) {
  switch (method) {
    case CheckMethod::SimpleSpectrum: return "simple_spectrum";
    case CheckMethod::MSpectrum: return "m_spectrum";
    case CheckMethod::Both: return "both";
  }
  return "unknown";
}

ConditionVerdict check_condition(const NetworkLinearEquation& problem, const Graph& graph,
                                 CheckMethod method) {
  const AssembledFlow flow = assemble(problem, graph);
  const LaplacianSpectrum spec = spectrum(flow.laplacian);
  switch (method) {
    case CheckMethod::SimpleSpectrum:
      if (!spec.simple()) {
        throw Error(ErrorKind::NotApplicable, "Laplacian has repeated eigenvalues; the basis support test is not decisive");
      }
      return check_support(flow, spec);
    case CheckMethod::MSpectrum:
      return check_m_spectrum(flow, spec);
    case CheckMethod::Both: {
      ConditionVerdict by_support = check_support(flow, spec);
      ConditionVerdict by_m = check_m_spectrum(flow, spec);
      if (by_support.holds != by_m.holds) {
        throw Error(ErrorKind::InternalInconsistency,
                    std::string("support test says ") + (by_support.holds ? "holds" : "fails") +
                        " but M spectrum says " + (by_m.holds ? "holds" : "fails"));
      }
      by_support.method = CheckMethod::Both;
      if (!by_support.witness) by_support.witness = std::move(by_m.witness);
      return by_support;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown check method");
}

double epsilon_star(std::span<const std::complex<double>> eigenvalues) {
  const double scale = spectral_scale(eigenvalues);
  bool any = false;
  double best = 0.0;
  for (auto l : eigenvalues) {
    if (is_zero_mode(l, scale) || is_marginal_mode(l, scale)) continue;
    const double value = -2.0 * l.real() / std::norm(l);
    if (!any || value < best) best = value;
    any = true;
  }
  if (!any) throw Error(ErrorKind::NoStableModes, "M has no eigenvalue with nonzero real part");
  return best;
}

double epsilon_star(const AssembledFlow& flow) {
  const auto eig = m_spectrum(flow);
  return epsilon_star(eig);
}

ZeroSpace zero_space_projector(const AssembledFlow& flow) {
  if (has_marginal_modes(m_spectrum(flow))) {
    throw Error(ErrorKind::ConditionViolated, "M has nonzero eigenvalues on the imaginary axis");
  }
  const int nm = flow.block_size();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(flow.system, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double tol = kKernelTolerance * s(0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > tol) ++rank;
  const Eigen::Index kdim = s.size() - rank;
  if (kdim != flow.dim) {
    throw Error(ErrorKind::InternalInconsistency, "zero eigenspace of M has dimension " +
                                                      std::to_string(kdim) + ", expected " +
                                                      std::to_string(flow.dim));
  }
  const Eigen::MatrixXd right = svd.matrixV().rightCols(kdim);
  const Eigen::MatrixXd left = svd.matrixU().rightCols(kdim);
  const Eigen::MatrixXd gram = left.transpose() * right;
  const Eigen::MatrixXd full = right * gram.fullPivLu().solve(left.transpose());

  ZeroSpace out;
  out.dim = static_cast<int>(kdim);
  out.projector = full.bottomRightCorner(nm, nm);
  return out;
}

Eigen::VectorXd equilibrium_dual(const AssembledFlow& flow) {
  const Eigen::VectorXd rhs = flow.z_h - flow.h_tilde * flow.x_star();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(flow.l_kron);
  const Eigen::VectorXd v = cod.solve(rhs);
  const double resid = (flow.l_kron * v - rhs).cwiseAbs().maxCoeff();
  if (resid > 1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::EquilibriumInfeasible,
                "no dual equilibrium: residual " + std::to_string(resid));
  }
  return v;
}

Eigen::VectorXd predict_v_limit(const AssembledFlow& flow, const Eigen::VectorXd& v_star,
                                const Eigen::VectorXd& v0) {
  const int nm = flow.block_size();
  if (v_star.size() != nm || v0.size() != nm) {
    throw Error(ErrorKind::DimensionMismatch, "v vectors must have length Nm");
  }
  const Eigen::VectorXd rhs = flow.z_h - flow.h_tilde * flow.x_star();
  const double resid = (flow.l_kron * v_star - rhs).cwiseAbs().maxCoeff();
  if (resid > 1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::EquilibriumInfeasible, "v* does not satisfy the equilibrium equations");
  }
  const ZeroSpace zs = zero_space_projector(flow);
  return v_star - zs.projector * v_star + zs.projector * v0;
}

SpectralReport analyze(const NetworkLinearEquation& problem, const Graph& graph) {
  const AssembledFlow flow = assemble(problem, graph);
  SpectralReport report;
  report.laplacian_spectrum = spectrum(flow.laplacian);
  report.m_eigenvalues = m_spectrum(flow);
  report.verdict = check_condition(problem, graph, CheckMethod::Both);
  try {
    report.epsilon_star = epsilon_star(report.m_eigenvalues);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoStableModes) throw;
  }
  if (report.verdict.holds) {
    ZeroSpace zs = zero_space_projector(flow);
    report.zero_space_dim = zs.dim;
    report.projector = std::move(zs.projector);
  } else {
    const double scale = spectral_scale(report.m_eigenvalues);
    report.zero_space_dim = static_cast<int>(std::count_if(
        report.m_eigenvalues.begin(), report.m_eigenvalues.end(),
        [&](auto l) { return is_zero_mode(l, scale); }));
  }
  return report;
}

}  // namespace lsqflow
