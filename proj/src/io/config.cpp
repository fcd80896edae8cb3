#include "lsqflow/io/config.hpp"

#include "lsqflow/switching.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace lsqflow::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::pair<Mode, std::string_view> kModes[] = {
    {Mode::Analyze, "analyze"},
    {Mode::SolveLsq, "solve-lsq"},
    {Mode::SimulateCt, "simulate-ct"},
    {Mode::SimulateDt, "simulate-dt"},
    {Mode::SimulateSwitching, "simulate-switching"},
    {Mode::EpsilonStar, "epsilon-star"},
    {Mode::GraphFeasibility, "graph-feasibility"},
};

const std::set<std::string> kKnownKeys = {
    "mode", "label", "problem", "H", "z", "graph", "graphs", "period_T", "x0", "v0", "step_h",
    "t_end", "epsilon", "max_steps", "record_every", "alpha", "families"};

std::string json_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string index_path(const std::string& parent, std::size_t i) {
  return parent + "[" + std::to_string(i) + "]";
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

class Parser {
 public:
  explicit Parser(std::string base_dir) : base_dir_(std::move(base_dir)) {}

  void fail(std::string path, std::string reason) {
    issues_.push_back({ErrorKind::SchemaError, std::move(path), std::move(reason), 0, 0});
  }
  [[nodiscard]] bool ok() const { return issues_.empty(); }
  std::vector<ConfigIssue>& issues() { return issues_; }
  [[nodiscard]] const std::string& base_dir() const { return base_dir_; }

  std::optional<double> number(const json& j, const std::string& path) {
    if (!j.is_number()) {
      fail(path, "must be a number");
      return std::nullopt;
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      fail(path, "must be finite");
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> positive(const json& obj, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    auto v = number(obj.at(key), key);
    if (v && !(*v > 0.0)) {
      fail(key, "must be positive");
      return std::nullopt;
    }
    return v;
  }

  std::optional<std::int64_t> positive_int(const json& obj, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& j = obj.at(key);
    if (!j.is_number_integer()) {
      fail(key, "must be an integer");
      return std::nullopt;
    }
    const auto v = j.get<std::int64_t>();
    if (v <= 0) {
      fail(key, "must be positive");
      return std::nullopt;
    }
    return v;
  }

  std::optional<Eigen::VectorXd> vector(const json& j, const std::string& path) {
    if (!j.is_array()) {
      fail(path, "must be an array of numbers");
      return std::nullopt;
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
    bool good = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      auto v = number(j[i], index_path(path, i));
      if (v) out(static_cast<Eigen::Index>(i)) = *v;
      else good = false;
    }
    if (!good) return std::nullopt;
    return out;
  }

  std::optional<Eigen::MatrixXd> matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) {
      fail(path, "must be a non-empty array of rows");
      return std::nullopt;
    }
    std::size_t cols = 0;
    std::vector<Eigen::VectorXd> rows;
    bool good = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      auto row = vector(j[i], index_path(path, i));
      if (!row) {
        good = false;
        continue;
      }
      if (i == 0) cols = static_cast<std::size_t>(row->size());
      if (static_cast<std::size_t>(row->size()) != cols || cols == 0) {
        fail(index_path(path, i), "row length differs from the first row");
        good = false;
        continue;
      }
      rows.push_back(std::move(*row));
    }
    if (!good) return std::nullopt;
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return out;
  }

  std::optional<json> load_json_file(const std::string& file, const std::string& path) {
    std::string text;
    try {
      text = read_file(resolve(base_dir_, file));
    } catch (const Error& e) {
      fail(path, e.what());
      return std::nullopt;
    }
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
      fail(path, "referenced file is not valid JSON: " + file);
      return std::nullopt;
    }
    return j;
  }

  std::optional<GraphSpec> graph(const json& j, const std::string& path) {
    GraphSpec spec;
    const json* body = &j;
    std::optional<json> loaded;
    if (j.is_string()) {
      spec.source = j.get<std::string>();
      loaded = load_json_file(*spec.source, path);
      if (!loaded) return std::nullopt;
      body = &*loaded;
    }
    if (!body->is_object()) {
      fail(path, "must be a graph object or a path to one");
      return std::nullopt;
    }
    const std::size_t before = issues_.size();
    for (const auto& [key, value] : body->items()) {
      if (key != "type" && key != "n" && key != "edges" && key != "supports") fail(json_path(path, key), "unknown key");
    }
    if (!body->contains("type") || !body->at("type").is_string()) {
      fail(json_path(path, "type"), "required");
    } else {
      spec.type = body->at("type").get<std::string>();
      if (spec.type != "custom" && !parse_family(spec.type)) {
        fail(json_path(path, "type"), "must be path, ring, star, complete or custom");
      }
    }
    if (!body->contains("n") || !body->at("n").is_number_integer()) {
      fail(json_path(path, "n"), "required integer");
    } else {
      spec.n = body->at("n").get<int>();
      if (spec.n < 2) fail(json_path(path, "n"), "must be at least 2");
    }
    if (spec.type == "custom") {
      if (!body->contains("edges") || !body->at("edges").is_array()) {
        fail(json_path(path, "edges"), "required for custom graphs");
      } else {
        const json& edges = body->at("edges");
        for (std::size_t i = 0; i < edges.size(); ++i) {
          const json& e = edges[i];
          if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
            fail(index_path(json_path(path, "edges"), i), "must be a pair of node indices");
            continue;
          }
          spec.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
      }
    } else if (body->contains("edges")) {
      fail(json_path(path, "edges"), "only allowed for custom graphs");
    }
    if (body->contains("supports")) {
      const json& s = body->at("supports");
      bool good = s.is_array();
      if (good) {
        for (const auto& entry : s) {
          if (!entry.is_array() || !std::all_of(entry.begin(), entry.end(), [](const json& x) { return x.is_number_integer(); })) {
            good = false;
            break;
          }
          std::vector<int> support = entry.get<std::vector<int>>();
          std::sort(support.begin(), support.end());
          spec.supports.push_back(std::move(support));
        }
      }
      if (!good) fail(json_path(path, "supports"), "must be an array of node index arrays");
    }
    if (issues_.size() != before) return std::nullopt;

    Graph g(2, {{0, 1}});
    try {
      g = spec.to_graph();
    } catch (const Error& e) {
      fail(path, e.what());
      return std::nullopt;
    }
    if (!g.is_connected()) {
      fail(path, "graph must be connected");
      return std::nullopt;
    }
    if (!spec.supports.empty()) {
      std::vector<std::vector<int>> zero_based;
      for (const auto& s : spec.supports) {
        std::vector<int> z;
        for (int i : s) z.push_back(i - 1);
        zero_based.push_back(std::move(z));
      }
      if (!matches_support_fingerprint(g, zero_based)) {
        fail(json_path(path, "supports"), "Laplacian eigenvector supports do not match the fingerprint");
        return std::nullopt;
      }
    }
    return spec;
  }

  std::optional<FamilySweep> family(const json& j, const std::string& path) {
    if (!j.is_object()) {
      fail(path, "must be an object with type and n");
      return std::nullopt;
    }
    FamilySweep sweep;
    bool good = true;
    for (const auto& [key, value] : j.items())
      if (key != "type" && key != "n") {
        fail(json_path(path, key), "unknown key");
        good = false;
      }
    if (!j.contains("type") || !j.at("type").is_string() || !parse_family(j.at("type").get<std::string>())) {
      fail(json_path(path, "type"), "must be path, ring, star or complete");
      good = false;
    } else {
      sweep.family = *parse_family(j.at("type").get<std::string>());
    }
    const json* n = j.contains("n") ? &j.at("n") : nullptr;
    if (n && n->is_number_integer()) {
      sweep.sizes.push_back(n->get<int>());
    } else if (n && n->is_array() && std::all_of(n->begin(), n->end(), [](const json& x) { return x.is_number_integer(); })) {
      sweep.sizes = n->get<std::vector<int>>();
    } else {
      fail(json_path(path, "n"), "required integer or array of integers");
      good = false;
    }
    for (int size : sweep.sizes)
      if (size < 3) {
        fail(json_path(path, "n"), "sizes must be at least 3");
        good = false;
        break;
      }
    if (!good) return std::nullopt;
    return sweep;
  }

 private:
  std::string base_dir_;
  std::vector<ConfigIssue> issues_;
};

bool requires_graph(Mode m) {
  return m == Mode::Analyze || m == Mode::SimulateCt || m == Mode::SimulateDt || m == Mode::EpsilonStar;
}

bool requires_problem(Mode m) { return m != Mode::GraphFeasibility; }

bool simulates(Mode m) {
  return m == Mode::SimulateCt || m == Mode::SimulateDt || m == Mode::SimulateSwitching;
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int col = 1;
  const std::size_t end = std::min(text.size(), byte > 0 ? byte - 1 : 0);
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

template <class T>
bool same_optional_eigen(const std::optional<T>& a, const std::optional<T>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->rows() == b->rows() && a->cols() == b->cols() && (a->array() == b->array()).all();
}

ordered_json graph_json(const GraphSpec& g) {
  if (g.source) return *g.source;
  ordered_json j;
  j["type"] = g.type;
  j["n"] = g.n;
  if (g.type == "custom") {
    ordered_json edges = ordered_json::array();
    for (const auto& [a, b] : g.edges) edges.push_back({a, b});
    j["edges"] = edges;
  }
  if (!g.supports.empty()) j["supports"] = g.supports;
  return j;
}

std::vector<double> as_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string_view to_string(Mode mode) {
  for (const auto& [m, name] : kModes)
    if (m == mode) return name;
  return "unknown";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (const auto& [m, n] : kModes)
    if (n == name) return m;
  return std::nullopt;
}

Graph GraphSpec::to_graph() const {
  if (type == "custom") {
    std::vector<Graph::Edge> zero_based;
    zero_based.reserve(edges.size());
    for (const auto& [a, b] : edges) {
      if (a < 1 || a > n || b < 1 || b > n) {
        throw Error(ErrorKind::InvalidNode, "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                                ") references a node outside 1.." + std::to_string(n));
      }
      zero_based.emplace_back(a - 1, b - 1);
    }
    return Graph(n, std::move(zero_based));
  }
  const auto family = parse_family(type);
  if (!family) throw Error(ErrorKind::InvalidArgument, "unknown graph type '" + type + "'");
  return make_family(*family, n);
}

NetworkLinearEquation RunConfig::problem() const {
  if (!h || !z) throw Error(ErrorKind::InvalidArgument, "config has no problem");
  return NetworkLinearEquation(*h, *z);
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.mode == b.mode && a.label == b.label && a.problem_path == b.problem_path &&
         same_optional_eigen(a.h, b.h) && same_optional_eigen(a.z, b.z) && a.graph == b.graph &&
         a.graphs == b.graphs && a.period_t == b.period_t && same_optional_eigen(a.x0, b.x0) &&
         same_optional_eigen(a.v0, b.v0) && a.step_h == b.step_h && a.t_end == b.t_end &&
         a.epsilon == b.epsilon && a.max_steps == b.max_steps && a.record_every == b.record_every &&
         a.alpha == b.alpha && a.families == b.families;
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(issues.empty() ? ErrorKind::SchemaError : issues.front().kind,
            [&] {
              std::string msg;
              for (const auto& i : issues) {
                if (!msg.empty()) msg += "; ";
                if (i.kind == ErrorKind::ParseError) {
                  msg += "line " + std::to_string(i.line) + ", column " + std::to_string(i.column) + ": " + i.reason;
                } else {
                  msg += i.path + ": " + i.reason;
                }
              }
              return msg;
            }()),
      issues_(std::move(issues)) {}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig parse_config(std::string_view text, const std::string& base_dir, std::optional<Mode> mode_override) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigError({{ErrorKind::ParseError, "", e.what(), line, col}});
  }
  Parser p(base_dir);
  if (!root.is_object()) throw ConfigError({{ErrorKind::SchemaError, "", "top level must be an object", 0, 0}});

  for (const auto& [key, value] : root.items())
    if (!kKnownKeys.count(key)) p.fail(key, "unknown key");

  RunConfig cfg;
  if (mode_override) {
    cfg.mode = *mode_override;
  } else if (!root.contains("mode")) {
    p.fail("mode", "required");
  } else if (!root.at("mode").is_string() || !parse_mode(root.at("mode").get<std::string>())) {
    p.fail("mode", "unknown mode");
  } else {
    cfg.mode = *parse_mode(root.at("mode").get<std::string>());
  }
  if (root.contains("label")) {
    if (root.at("label").is_string()) cfg.label = root.at("label").get<std::string>();
    else p.fail("label", "must be a string");
  }

  // Problem: file reference or inline H/z.
  const json* problem_src = &root;
  std::string prefix;
  std::optional<json> loaded;
  if (root.contains("problem")) {
    if (root.contains("H") || root.contains("z")) p.fail("problem", "give either problem or inline H/z, not both");
    if (!root.at("problem").is_string()) {
      p.fail("problem", "must be a path to a problem file");
    } else {
      cfg.problem_path = root.at("problem").get<std::string>();
      loaded = p.load_json_file(*cfg.problem_path, "problem");
      if (loaded) {
        problem_src = &*loaded;
        prefix = "problem";
      }
    }
  }
  const bool want_problem = requires_problem(cfg.mode);
  if (!root.contains("problem") || loaded) {
    if (problem_src->contains("H")) cfg.h = p.matrix(problem_src->at("H"), json_path(prefix, "H"));
    else if (want_problem) p.fail(json_path(prefix, "H"), "required");
    if (problem_src->contains("z")) cfg.z = p.vector(problem_src->at("z"), json_path(prefix, "z"));
    else if (want_problem) p.fail(json_path(prefix, "z"), "required");
  }
  if (cfg.h && cfg.z) {
    if (cfg.z->size() != cfg.h->rows()) {
      p.fail(json_path(prefix, "z"), "length must equal the number of rows of H");
    } else {
      try {
        (void)cfg.problem();
      } catch (const Error& e) {
        p.fail(json_path(prefix, "H"), e.what());
      }
    }
  }

  if (root.contains("graph")) cfg.graph = p.graph(root.at("graph"), "graph");
  if (root.contains("graphs")) {
    const json& gs = root.at("graphs");
    if (!gs.is_array() || gs.empty()) {
      p.fail("graphs", "must be a non-empty array");
    } else {
      for (std::size_t i = 0; i < gs.size(); ++i)
        if (auto g = p.graph(gs[i], index_path("graphs", i))) cfg.graphs.push_back(std::move(*g));
    }
  }
  cfg.period_t = p.positive(root, "period_T");
  cfg.step_h = p.positive(root, "step_h");
  cfg.t_end = p.positive(root, "t_end");
  cfg.epsilon = p.positive(root, "epsilon");
  cfg.alpha = p.positive(root, "alpha");
  cfg.max_steps = p.positive_int(root, "max_steps");
  if (auto r = p.positive_int(root, "record_every")) cfg.record_every = static_cast<int>(*r);
  if (root.contains("x0")) cfg.x0 = p.vector(root.at("x0"), "x0");
  if (root.contains("v0")) cfg.v0 = p.vector(root.at("v0"), "v0");
  if (root.contains("families")) {
    const json& fs = root.at("families");
    if (!fs.is_array()) {
      p.fail("families", "must be an array");
    } else {
      for (std::size_t i = 0; i < fs.size(); ++i)
        if (auto f = p.family(fs[i], index_path("families", i))) cfg.families.push_back(std::move(*f));
    }
  }

  // Mode-specific requirements and cross-field consistency.
  if (requires_graph(cfg.mode) && !root.contains("graph")) p.fail("graph", "required");
  if (cfg.mode == Mode::SimulateSwitching) {
    if (!root.contains("graphs")) p.fail("graphs", "required");
    if (!root.contains("period_T")) p.fail("period_T", "required");
  }
  if (simulates(cfg.mode) && !root.contains("x0")) p.fail("x0", "required");
  if (cfg.mode == Mode::SimulateDt && !root.contains("epsilon")) p.fail("epsilon", "required");
  if (cfg.mode == Mode::GraphFeasibility && !root.contains("families")) p.fail("families", "required");

  if (cfg.h) {
    const auto n = cfg.h->rows();
    const auto nm = n * cfg.h->cols();
    if (cfg.graph && cfg.graph->n != n) p.fail("graph.n", "must equal the number of rows of H");
    for (std::size_t i = 0; i < cfg.graphs.size(); ++i)
      if (cfg.graphs[i].n != n) p.fail(index_path("graphs", i) + ".n", "must equal the number of rows of H");
    if (cfg.x0 && cfg.x0->size() != nm) p.fail("x0", "length must be N*m = " + std::to_string(nm));
    if (cfg.v0 && cfg.v0->size() != nm) p.fail("v0", "length must be N*m = " + std::to_string(nm));
  }

  if (!p.ok()) throw ConfigError(std::move(p.issues()));
  return cfg;
}

RunConfig load_config(const std::string& path, std::optional<Mode> mode_override) {
  const std::string text = read_file(path);
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(text, dir.empty() ? "." : dir.string(), mode_override);
}

std::string serialize_config(const RunConfig& cfg) {
  ordered_json j;
  j["mode"] = std::string(to_string(cfg.mode));
  if (cfg.label) j["label"] = *cfg.label;
  if (cfg.problem_path) {
    j["problem"] = *cfg.problem_path;
  } else if (cfg.h && cfg.z) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < cfg.h->rows(); ++i) rows.push_back(as_std(cfg.h->row(i).transpose()));
    j["H"] = rows;
    j["z"] = as_std(*cfg.z);
  }
  if (cfg.graph) j["graph"] = graph_json(*cfg.graph);
  if (!cfg.graphs.empty()) {
    ordered_json gs = ordered_json::array();
    for (const auto& g : cfg.graphs) gs.push_back(graph_json(g));
    j["graphs"] = gs;
  }
  if (cfg.period_t) j["period_T"] = *cfg.period_t;
  if (cfg.x0) j["x0"] = as_std(*cfg.x0);
  if (cfg.v0) j["v0"] = as_std(*cfg.v0);
  if (cfg.step_h) j["step_h"] = *cfg.step_h;
  if (cfg.t_end) j["t_end"] = *cfg.t_end;
  if (cfg.epsilon) j["epsilon"] = *cfg.epsilon;
  if (cfg.max_steps) j["max_steps"] = *cfg.max_steps;
  if (cfg.record_every) j["record_every"] = *cfg.record_every;
  if (cfg.alpha) j["alpha"] = *cfg.alpha;
  if (!cfg.families.empty()) {
    ordered_json fs = ordered_json::array();
    for (const auto& f : cfg.families) fs.push_back({{"type", std::string(to_string(f.family))}, {"n", f.sizes}});
    j["families"] = fs;
  }
  return j.dump(2) + "\n";
}

}  // namespace lsqflow::io
