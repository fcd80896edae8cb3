#include "lsqflow/io/serialize.hpp"

#include "lsqflow/io/config.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace lsqflow::io {

namespace {

using nlohmann::ordered_json;

void put_double(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

std::vector<double> as_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(as_std(m.row(i).transpose()));
  return rows;
}

ordered_json lsq_json(const LeastSquaresSolution& lsq) {
  ordered_json j;
  j["y_star"] = as_std(lsq.y_star);
  j["residual"] = as_std(lsq.residual);
  j["objective"] = lsq.objective;
  return j;
}

}  // namespace

std::string csv_header(int n_nodes, int dim) {
  std::string h = "t";
  for (const char* block : {"x", "v"})
    for (int i = 1; i <= n_nodes; ++i)
      for (int c = 1; c <= dim; ++c) h += "," + std::string(block) + "_" + std::to_string(i) + "_" + std::to_string(c);
  h += ",error,cost";
  return h;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << csv_header(traj.n_nodes, traj.dim) << '\n';
  std::string line;
  for (const auto& s : traj.samples) {
    line.clear();
    put_double(line, s.t);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
      line += ',';
      put_double(line, s.x(i));
    }
    for (Eigen::Index i = 0; i < s.v.size(); ++i) {
      line += ',';
      put_double(line, s.v(i));
    }
    line += ',';
    put_double(line, s.error);
    line += ',';
    put_double(line, s.cost);
    out << line << '\n';
  }
}

std::string to_csv(const Trajectory& traj) {
  std::ostringstream ss;
  write_csv(ss, traj);
  return ss.str();
}

std::string report_json(const SpectralReport& report, const LeastSquaresSolution& lsq) {
  ordered_json j;
  j["least_squares"] = lsq_json(lsq);
  ordered_json verdict;
  verdict["holds"] = report.verdict.holds;
  verdict["method"] = std::string(to_string(report.verdict.method));
  if (report.verdict.witness) {
    const auto& w = *report.verdict.witness;
    std::vector<int> support;
    for (int i : w.support) support.push_back(i + 1);
    verdict["witness"] = {{"laplacian_eigenvalue", w.laplacian_eigenvalue},
                          {"alpha", as_std(w.alpha)},
                          {"eta", as_std(w.eta)},
                          {"support", support},
                          {"span_dim", w.span_dim}};
  } else {
    verdict["witness"] = nullptr;
  }
  j["verdict"] = verdict;
  j["epsilon_star"] = report.epsilon_star ? ordered_json(*report.epsilon_star) : ordered_json(nullptr);
  j["zero_space_dim"] = report.zero_space_dim;
  j["projector"] = report.projector ? matrix_json(*report.projector) : ordered_json(nullptr);
  ordered_json eig = ordered_json::array();
  for (const auto& l : report.m_eigenvalues) eig.push_back({l.real(), l.imag()});
  j["m_eigenvalues"] = eig;
  j["laplacian_eigenvalues"] = as_std(report.laplacian_spectrum.eigenvalues);
  return j.dump(2) + "\n";
}

std::string solution_json(const LeastSquaresSolution& lsq) { return lsq_json(lsq).dump(2) + "\n"; }

std::string error_envelope(const Error& error) {
  ordered_json j;
  j["status"] = "error";
  j["kind"] = std::string(to_string(error.kind()));
  j["message"] = error.what();
  if (const auto* cfg = dynamic_cast<const ConfigError*>(&error)) {
    ordered_json issues = ordered_json::array();
    for (const auto& i : cfg->issues()) {
      ordered_json e;
      e["kind"] = std::string(to_string(i.kind));
      if (i.kind == ErrorKind::ParseError) {
        e["line"] = i.line;
        e["column"] = i.column;
      } else {
        e["path"] = i.path;
      }
      e["reason"] = i.reason;
      issues.push_back(e);
    }
    j["issues"] = issues;
  }
  return j.dump() + "\n";
}

}  // namespace lsqflow::io
