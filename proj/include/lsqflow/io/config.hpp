#pragma once

#include "lsqflow/error.hpp"
#include "lsqflow/graph.hpp"
#include "lsqflow/linear_problem.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lsqflow::io {

enum class Mode { Analyze, SolveLsq, SimulateCt, SimulateDt, SimulateSwitching, EpsilonStar, GraphFeasibility };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

/// Graph as written in a config. Node indices are 1-based here and only here.
struct GraphSpec {
  std::string type;  // path | ring | star | complete | custom
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  /// Expected supports of the Laplacian basis eigenvectors (1-based, sorted); checked on load.
  std::vector<std::vector<int>> supports;
  /// Set when the spec was loaded from a separate file; serialization writes the path back.
  std::optional<std::string> source;

  [[nodiscard]] Graph to_graph() const;
  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

struct FamilySweep {
  GraphFamily family = GraphFamily::Path;
  std::vector<int> sizes;
  friend bool operator==(const FamilySweep&, const FamilySweep&) = default;
};

struct RunConfig {
  Mode mode = Mode::Analyze;
  std::optional<std::string> label;

  std::optional<std::string> problem_path;  // as written; H/z hold the loaded values
  std::optional<Eigen::MatrixXd> h;
  std::optional<Eigen::VectorXd> z;

  std::optional<GraphSpec> graph;
  std::vector<GraphSpec> graphs;
  std::optional<double> period_t;

  std::optional<Eigen::VectorXd> x0;
  std::optional<Eigen::VectorXd> v0;

  std::optional<double> step_h;
  std::optional<double> t_end;
  std::optional<double> epsilon;
  std::optional<std::int64_t> max_steps;
  std::optional<int> record_every;
  std::optional<double> alpha;

  std::vector<FamilySweep> families;

  [[nodiscard]] NetworkLinearEquation problem() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

struct ConfigIssue {
  ErrorKind kind = ErrorKind::SchemaError;  // ParseError or SchemaError
  std::string path;                         // JSON path, empty for parse errors
  std::string reason;
  int line = 0;  // 1-based, parse errors only
  int column = 0;
};

/// Carries every violation found, not only the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  [[nodiscard]] const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Relative file references ("problem", graph paths) resolve against base_dir.
/// When mode_override is set it replaces the config's "mode" before validation.
RunConfig parse_config(std::string_view text, const std::string& base_dir = ".",
                       std::optional<Mode> mode_override = std::nullopt);
RunConfig load_config(const std::string& path, std::optional<Mode> mode_override = std::nullopt);

std::string serialize_config(const RunConfig& config);

std::string read_file(const std::string& path);

}  // namespace lsqflow::io
