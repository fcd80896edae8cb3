#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lsqflow {

enum class GraphFamily { Path, Ring, Star, Complete };

std::string_view to_string(GraphFamily family);
std::optional<GraphFamily> parse_family(std::string_view name);

/// Undirected simple graph on nodes 0..n-1. Edges are stored normalized
/// (first < second) and sorted; self-loops and duplicates are rejected.
class Graph {
 public:
  using Edge = std::pair<int, int>;

  Graph(int n_nodes, std::vector<Edge> edges);

  [[nodiscard]] int n_nodes() const noexcept { return n_; }
  [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
  [[nodiscard]] std::vector<int> degrees() const;
  [[nodiscard]] bool is_connected() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int n_;
  std::vector<Edge> edges_;
};

/// Path 1-2-...-n, ring, star with hub at the first node, or complete graph. Requires n >= 3.
Graph make_family(GraphFamily family, int n);

/// L = D - A.
Eigen::MatrixXd laplacian(const Graph& graph);

struct LaplacianSpectrum {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // column k pairs with eigenvalues(k), orthonormal
  /// Index groups of numerically equal eigenvalues, in ascending order.
  std::vector<std::vector<int>> groups;
  double group_tolerance = 0.0;

  [[nodiscard]] bool simple() const noexcept {
    return groups.size() == static_cast<std::size_t>(eigenvalues.size());
  }
  /// Orthonormal basis of the eigenspace of group g (N x multiplicity).
  [[nodiscard]] Eigen::MatrixXd eigenspace(std::size_t g) const;
  [[nodiscard]] double group_value(std::size_t g) const;
};

/// Symmetric eigendecomposition with eigenvalue grouping at 1e-8 * max(1, lambda_max).
LaplacianSpectrum spectrum(const Eigen::MatrixXd& laplacian);

/// Entries with |a_i| <= 1e-9 * ||a|| are treated as zero.
inline constexpr double kSupportTolerance = 1e-9;

std::vector<int> support_of(const Eigen::VectorXd& vec);

struct SupportOptions {
  int samples_per_eigenspace = 1000;
  std::uint64_t seed = 0x5eedULL;
  /// Upper bound on coordinate subsets enumerated per repeated eigenspace.
  std::size_t enumeration_budget = 50000;
};

struct SupportReport {
  /// Supports of the computed basis eigenvectors (0-based node indices).
  std::vector<std::vector<int>> basis_supports;
  /// A vector attaining min_support, and its eigenvalue.
  Eigen::VectorXd minimizer;
  double minimizer_eigenvalue = 0.0;
  int min_support = 0;
  bool simple_spectrum = true;
  /// True when every repeated eigenspace was searched exhaustively.
  bool exhaustive = true;
};

/// Minimum eigenvector support over all eigenspaces. Repeated eigenspaces are
/// searched by sampling random unit combinations and by enumerating the
/// vectors that vanish on d-1 chosen coordinates, which contains every
/// minimal-support vector of a d-dimensional eigenspace.
SupportReport support_report(const LaplacianSpectrum& spec, const SupportOptions& options = {});

/// Closed-form min |support| for the covered cases: path with n = 2^l or 3l,
/// ring with n prime, 3l, or 2^l (l >= 3), star and complete for any n >= 3.
int family_min_support(GraphFamily family, int n);

}  // namespace lsqflow
