#include "support/oracles.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

Eigen::VectorXd gauss_solve(Eigen::MatrixXd a, Eigen::VectorXd b) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (a(piv, col) == 0.0) throw std::runtime_error("singular system in oracle");
    if (piv != col) {
      for (Eigen::Index c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
      std::swap(b(col), b(piv));
    }
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (Eigen::Index c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b(r) -= f * b(col);
    }
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    double s = b(r);
    for (Eigen::Index c = r + 1; c < n; ++c) s -= a(r, c) * x(c);
    x(r) = s / a(r, r);
  }
  return x;
}

Eigen::VectorXd normal_equations_solve(const Eigen::MatrixXd& h, const Eigen::VectorXd& z) {
  const Eigen::Index m = h.cols();
  Eigen::MatrixXd g(m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    rhs(a) = 0.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i) rhs(a) += h(i, a) * z(i);
    for (Eigen::Index b = 0; b < m; ++b) {
      g(a, b) = 0.0;
      for (Eigen::Index i = 0; i < h.rows(); ++i) g(a, b) += h(i, a) * h(i, b);
    }
  }
  return gauss_solve(g, rhs);
}

Eigen::MatrixXd system_matrix(const Eigen::MatrixXd& h, const lsqflow::Graph& g) {
  const int n = g.n_nodes();
  const int m = static_cast<int>(h.cols());
  const int nm = n * m;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * nm, 2 * nm);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) out(i * m + a, i * m + b) = -h(i, a) * h(i, b);
  for (const auto& [i, j] : g.edges()) {
    for (int a = 0; a < m; ++a) {
      // L(i,i) += 1, L(j,j) += 1, L(i,j) = L(j,i) = -1, placed in -L block and +L block.
      for (auto [r, c, w] : {std::tuple{i, i, 1.0}, std::tuple{j, j, 1.0}, std::tuple{i, j, -1.0}, std::tuple{j, i, -1.0}}) {
        out(r * m + a, nm + c * m + a) -= w;
        out(nm + r * m + a, c * m + a) += w;
      }
    }
  }
  return out;
}

std::vector<std::complex<double>> reference_eigenvalues(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  std::vector<std::complex<double>> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), [](auto x, auto y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); });
  return out;
}

double epsilon_star_reference(const Eigen::MatrixXd& m, double tol) {
  double best = INFINITY;
  const auto eig = reference_eigenvalues(m);
  double scale = 1.0;
  for (auto l : eig) scale = std::max(scale, std::abs(l));
  for (auto l : eig) {
    if (std::abs(l) <= tol * scale || std::abs(l.real()) <= tol * std::abs(l)) continue;
    best = std::min(best, -2.0 * l.real() / std::norm(l));
  }
  return best;
}

void node_rhs(const Eigen::MatrixXd& h, const Eigen::VectorXd& z, const lsqflow::Graph& g, double alpha,
              const Eigen::VectorXd& x, const Eigen::VectorXd& v, Eigen::VectorXd& dx, Eigen::VectorXd& dv) {
  const int n = g.n_nodes();
  const int m = static_cast<int>(h.cols());
  dx.setZero(n * m);
  dv.setZero(n * m);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd hi = h.row(i).transpose();
    dx.segment(i * m, m) = -hi * (hi.dot(x.segment(i * m, m)) - z(i));
  }
  for (const auto& [i, j] : g.edges()) {
    const Eigen::VectorXd dxij = x.segment(i * m, m) - x.segment(j * m, m);
    const Eigen::VectorXd dvij = v.segment(i * m, m) - v.segment(j * m, m);
    dx.segment(i * m, m) -= dvij + alpha * dxij;
    dx.segment(j * m, m) += dvij + alpha * dxij;
    dv.segment(i * m, m) += dxij;
    dv.segment(j * m, m) -= dxij;
  }
}

void rk4_reference(const Eigen::MatrixXd& h, const Eigen::VectorXd& z, const lsqflow::Graph& g, double alpha,
                   Eigen::VectorXd& x, Eigen::VectorXd& v, double step, long steps) {
  Eigen::VectorXd k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
  for (long s = 0; s < steps; ++s) {
    node_rhs(h, z, g, alpha, x, v, k1x, k1v);
    node_rhs(h, z, g, alpha, x + 0.5 * step * k1x, v + 0.5 * step * k1v, k2x, k2v);
    node_rhs(h, z, g, alpha, x + 0.5 * step * k2x, v + 0.5 * step * k2v, k3x, k3v);
    node_rhs(h, z, g, alpha, x + step * k3x, v + step * k3v, k4x, k4v);
    x += step / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
}

void euler_reference(const Eigen::MatrixXd& h, const Eigen::VectorXd& z, const lsqflow::Graph& g,
                     Eigen::VectorXd& x, Eigen::VectorXd& v, double eps, long steps) {
  Eigen::VectorXd dx, dv;
  for (long s = 0; s < steps; ++s) {
    node_rhs(h, z, g, 0.0, x, v, dx, dv);
    x += eps * dx;
    v += eps * dv;
  }
}

lsqflow::Graph random_connected_graph(int n, std::mt19937_64& rng, double extra_edge_prob) {
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<bool>> have(n, std::vector<bool>(n, false));
  for (int i = 1; i < n; ++i) {
    const int j = std::uniform_int_distribution<int>(0, i - 1)(rng);
    edges.emplace_back(j, i);
    have[j][i] = have[i][j] = true;
  }
  std::bernoulli_distribution coin(extra_edge_prob);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!have[i][j] && coin(rng)) edges.emplace_back(i, j);
  return lsqflow::Graph(n, edges);
}

Eigen::MatrixXd gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = nd(rng);
  return out;
}

}  // namespace oracle
