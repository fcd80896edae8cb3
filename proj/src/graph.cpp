#include "lsqflow/graph.hpp"

#include "lsqflow/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace lsqflow {

std::string_view to_string(GraphFamily family) {
  switch (family) {
    case GraphFamily::Path: return "path";
    case GraphFamily::Ring: return "ring";
    case GraphFamily::Star: return "star";
    case GraphFamily::Complete: return "complete";
  }
  return "unknown";
}

std::optional<GraphFamily> parse_family(std::string_view name) {
  if (name == "path") return GraphFamily::Path;
  if (name == "ring") return GraphFamily::Ring;
  if (name == "star") return GraphFamily::Star;
  if (name == "complete") return GraphFamily::Complete;
  return std::nullopt;
}

Graph::Graph(int n_nodes, std::vector<Edge> edges) : n_(n_nodes), edges_(std::move(edges)) {
  if (n_ < 1) throw Error(ErrorKind::InvalidArgument, "graph needs at least one node");
  for (auto& [a, b] : edges_) {
    if (a < 0 || b < 0 || a >= n_ || b >= n_) {
      throw Error(ErrorKind::InvalidNode, "edge (" + std::to_string(a + 1) + "," +
                                              std::to_string(b + 1) + ") references a node outside 1.." +
                                              std::to_string(n_));
    }
    if (a == b) {
      throw Error(ErrorKind::InvalidArgument, "self-loop at node " + std::to_string(a + 1));
    }
    if (a > b) std::swap(a, b);
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw Error(ErrorKind::InvalidArgument, "duplicate edge (" + std::to_string(dup->first + 1) +
                                                "," + std::to_string(dup->second + 1) + ")");
  }
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(n_, 0);
  for (const auto& [a, b] : edges_) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

bool Graph::is_connected() const {
  std::vector<int> parent(n_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n_;
  for (const auto& [a, b] : edges_) {
    const int ra = find(a);
    const int rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

Graph make_family(GraphFamily family, int n) {
  if (n < 3) {
    throw Error(ErrorKind::TooSmall, std::string(to_string(family)) + " graph needs n >= 3, got " +
                                         std::to_string(n));
  }
  std::vector<Graph::Edge> edges;
  switch (family) {
    case GraphFamily::Path:
      for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      break;
    case GraphFamily::Ring:
      for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      edges.emplace_back(0, n - 1);
      break;
    case GraphFamily::Star:
      for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
      break;
    case GraphFamily::Complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      break;
  }
  return Graph(n, std::move(edges));
}

Eigen::MatrixXd laplacian(const Graph& graph) {
  const int n = graph.n_nodes();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [a, b] : graph.edges()) {
    l(a, b) = -1.0;
    l(b, a) = -1.0;
  }
  const auto deg = graph.degrees();
  for (int i = 0; i < n; ++i) l(i, i) = static_cast<double>(deg[i]);
  return l;
}

Eigen::MatrixXd LaplacianSpectrum::eigenspace(std::size_t g) const {
  const auto& idx = groups.at(g);
  Eigen::MatrixXd q(eigenvectors.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) q.col(static_cast<Eigen::Index>(k)) = eigenvectors.col(idx[k]);
  return q;
}

double LaplacianSpectrum::group_value(std::size_t g) const {
  const auto& idx = groups.at(g);
  double sum = 0.0;
  for (int k : idx) sum += eigenvalues(k);
  return sum / static_cast<double>(idx.size());
}

LaplacianSpectrum spectrum(const Eigen::MatrixXd& l) {
  if (l.rows() != l.cols()) throw Error(ErrorKind::DimensionMismatch, "Laplacian must be square");
  if ((l - l.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw Error(ErrorKind::InvalidArgument, "Laplacian must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "symmetric eigensolver did not converge");
  }
  LaplacianSpectrum out;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();

  const double norm_inf = l.cwiseAbs().rowwise().sum().maxCoeff();
  const double resid_tol = 1e-9 * std::max(norm_inf, 1.0);
  for (Eigen::Index k = 0; k < out.eigenvalues.size(); ++k) {
    const double r = (l * out.eigenvectors.col(k) - out.eigenvalues(k) * out.eigenvectors.col(k))
                         .cwiseAbs()
                         .maxCoeff();
    if (r > resid_tol) {
      throw Error(ErrorKind::NumericalFailure,
                  "eigenpair " + std::to_string(k) + " residual " + std::to_string(r));
    }
  }

  const double lambda_max = out.eigenvalues.size() > 0 ? out.eigenvalues.maxCoeff() : 0.0;
  out.group_tolerance = 1e-8 * std::max(1.0, lambda_max);
  for (int k = 0; k < out.eigenvalues.size(); ++k) {
    if (!out.groups.empty() &&
        out.eigenvalues(k) - out.eigenvalues(out.groups.back().back()) <= out.group_tolerance) {
      out.groups.back().push_back(k);
    } else {
      out.groups.push_back({k});
    }
  }
  return out;
}

std::vector<int> support_of(const Eigen::VectorXd& vec) {
  std::vector<int> s;
  const double tol = kSupportTolerance * vec.norm();
  for (int i = 0; i < vec.size(); ++i)
    if (std::abs(vec(i)) > tol) s.push_back(i);
  return s;
}

namespace {

std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(c + 0.5L);
}

struct Best {
  int size = -1;
  Eigen::VectorXd vec;
  double eigenvalue = 0.0;

  void offer(const Eigen::VectorXd& v, double lambda) {
    if (v.norm() == 0.0) return;
    const int s = static_cast<int>(support_of(v).size());
    if (s == 0) return;
    if (size < 0 || s < size) {
      size = s;
      vec = v.normalized();
      eigenvalue = lambda;
    }
  }
};

// Every vector of minimal support in span(Q) is the unique (up to scale)
// member vanishing on some d-1 coordinates where Q restricted to them has
// full row rank, so enumerating those subsets is exhaustive.
bool enumerate_circuits(const Eigen::MatrixXd& q, double lambda, std::size_t budget, Best& best) {
  const int n = static_cast<int>(q.rows());
  const int d = static_cast<int>(q.cols());
  const int k = d - 1;
  if (binomial_capped(static_cast<std::size_t>(n), static_cast<std::size_t>(k), budget) > budget) {
    return false;
  }
  std::vector<int> subset(k);
  std::iota(subset.begin(), subset.end(), 0);
  Eigen::MatrixXd rows(k, d);
  while (true) {
    for (int r = 0; r < k; ++r) rows.row(r) = q.row(subset[r]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const bool full_rank = s.size() == k && (k == 0 || s(k - 1) > 1e-10 * std::max(1.0, s(0)));
    if (full_rank) best.offer(q * svd.matrixV().col(d - 1), lambda);

    int pos = k - 1;
    while (pos >= 0 && subset[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (int r = pos + 1; r < k; ++r) subset[r] = subset[r - 1] + 1;
  }
  return true;
}

}  // namespace

SupportReport support_report(const LaplacianSpectrum& spec, const SupportOptions& options) {
  SupportReport report;
  report.simple_spectrum = spec.simple();
  for (Eigen::Index k = 0; k < spec.eigenvectors.cols(); ++k) {
    report.basis_supports.push_back(support_of(spec.eigenvectors.col(k)));
  }

  Best best;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const Eigen::MatrixXd q = spec.eigenspace(g);
    const double lambda = spec.group_value(g);
    for (Eigen::Index c = 0; c < q.cols(); ++c) best.offer(q.col(c), lambda);
    if (q.cols() == 1) continue;

    for (int s = 0; s < options.samples_per_eigenspace; ++s) {
      Eigen::VectorXd coeff(q.cols());
      for (Eigen::Index c = 0; c < coeff.size(); ++c) coeff(c) = gauss(rng);
      best.offer(q * coeff.normalized(), lambda);
    }
    if (!enumerate_circuits(q, lambda, options.enumeration_budget, best)) report.exhaustive = false;
  }
  report.min_support = best.size;
  report.minimizer = best.vec;
  report.minimizer_eigenvalue = best.eigenvalue;
  return report;
}

namespace {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

bool is_power_of_two(int n) { return n > 0 && std::has_single_bit(static_cast<unsigned>(n)); }

}  // namespace

int family_min_support(GraphFamily family, int n) {
  if (n < 3) throw Error(ErrorKind::TooSmall, "family graphs need n >= 3");
  auto uncovered = [&]() -> Error {
    return Error(ErrorKind::NotCharacterized, "no closed form for " + std::string(to_string(family)) +
                                                  " graph with n=" + std::to_string(n));
  };
  switch (family) {
    case GraphFamily::Path:
      if (is_power_of_two(n)) return n;
      if (n % 3 == 0) return 2 * n / 3;
      throw uncovered();
    case GraphFamily::Ring:
      if (is_prime(n)) return n - 1;
      if (n % 3 == 0) return 2 * n / 3;
      if (is_power_of_two(n) && n >= 8) return n / 2;
      throw uncovered();
    case GraphFamily::Star:
    case GraphFamily::Complete:
      return 2;
  }
  throw uncovered();
}

}  // namespace lsqflow
