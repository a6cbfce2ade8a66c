#include "rsense/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rsense {

namespace {

using nlohmann::json;

// 17 significant digits round-trip every double exactly.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_vector(std::string& out, const Vector& v) {
  out += '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt(v(i));
  }
  out += ']';
}

void append_matrix_rows(std::string& out, const Matrix& M) {
  out += '[';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    if (i) out += ',';
    out += '[';
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out += ',';
      out += fmt(M(i, j));
    }
    out += ']';
  }
  out += ']';
}

json parse_or_throw(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("parse error at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw SchemaError(std::string("missing required key \"") + key + "\"");
  return *it;
}

Vector vector_from(const json& arr, const char* what) {
  if (!arr.is_array())
    throw SchemaError(std::string(what) + " must be an array");
  Vector v(arr.size());
  Eigen::Index i = 0;
  for (const auto& e : arr) {
    if (!e.is_number())
      throw SchemaError(std::string(what) + " entries must be numbers");
    v(i++) = e.get<double>();
  }
  return v;
}

Matrix matrix_from(const json& arr, const char* what) {
  if (!arr.is_array() || arr.empty())
    throw SchemaError(std::string(what) + " must be a nonempty array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(arr.size());
  Eigen::Index cols = -1;
  Matrix M;
  Eigen::Index i = 0;
  for (const auto& row : arr) {
    Vector r = vector_from(row, what);
    if (cols < 0) {
      cols = r.size();
      M.resize(rows, cols);
    } else if (r.size() != cols) {
      throw SchemaError(std::string(what) + " rows have unequal lengths");
    }
    M.row(i++) = r.transpose();
  }
  return M;
}

}  // namespace

std::string problem_to_json(const SensingProblem& p) {
  std::string out;
  out.reserve(static_cast<size_t>(p.k()) * p.m() * (p.n() + 1) * 20 + 256);
  out += "{\n";
  out += "  \"format_version\": 1,\n";
  out += "  \"n\": " + std::to_string(p.n()) + ",\n";
  out += "  \"m\": " + std::to_string(p.m()) + ",\n";
  out += "  \"k\": " + std::to_string(p.k()) + ",\n";
  out += "  \"blocks\": [\n";
  for (int i = 0; i < p.k(); ++i) {
    out += "    {\"A\": ";
    append_matrix_rows(out, p.block_A(i));
    out += ", \"b\": ";
    append_vector(out, p.block_b(i));
    out += (i + 1 < p.k()) ? "},\n" : "}\n";
  }
  out += "  ]";
  if (p.truth()) {
    const GroundTruth& t = *p.truth();
    out += ",\n  \"truth\": {\"x0\": ";
    append_vector(out, t.x0);
    out += ", \"reliable_set\": [";
    for (size_t i = 0; i < t.reliable_set.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(t.reliable_set[i] + 1);  // serialized 1-based
    }
    out += "], \"sigma\": " + fmt(t.sigma);
    out += ", \"outlier_model\": \"" + outlier_model_name(t.model) + "\"}";
  }
  out += "\n}\n";
  return out;
}

SensingProblem problem_from_json(const std::string& text) {
  json j = parse_or_throw(text);
  if (!j.is_object()) throw SchemaError("top level must be an object");
  const json& ver = require(j, "format_version");
  if (!ver.is_number_integer() || ver.get<int>() != 1)
    throw SchemaError("unsupported format_version (expected 1)");
  const int n = require(j, "n").get<int>();
  const int m = require(j, "m").get<int>();
  const int k = require(j, "k").get<int>();
  const json& blocks = require(j, "blocks");
  if (!blocks.is_array() || static_cast<int>(blocks.size()) != k)
    throw SchemaError("blocks must be an array of k objects");
  std::vector<Matrix> As;
  std::vector<Vector> bs;
  As.reserve(blocks.size());
  bs.reserve(blocks.size());
  for (const auto& blk : blocks) {
    As.push_back(matrix_from(require(blk, "A"), "block A"));
    bs.push_back(vector_from(require(blk, "b"), "block b"));
    if (As.back().rows() != m || As.back().cols() != n ||
        bs.back().size() != m)
      throw SchemaError("block shape disagrees with (n, m)");
  }
  std::optional<GroundTruth> truth;
  if (auto it = j.find("truth"); it != j.end() && !it->is_null()) {
    GroundTruth t;
    t.x0 = vector_from(require(*it, "x0"), "truth.x0");
    const json& rel = require(*it, "reliable_set");
    if (!rel.is_array()) throw SchemaError("truth.reliable_set must be an array");
    for (const auto& e : rel) t.reliable_set.push_back(e.get<int>() - 1);
    t.sigma = require(*it, "sigma").get<double>();
    t.model = outlier_model_from_name(
        require(*it, "outlier_model").get<std::string>());
    truth = std::move(t);
  }
  // Construction revalidates everything (including k >= 1 and finiteness).
  return SensingProblem::from_blocks(As, bs, std::move(truth));
}

void save_problem(const SensingProblem& p, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open \"" + path + "\" for writing");
  f << problem_to_json(p);
}

SensingProblem load_problem(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << f.rdbuf();
  return problem_from_json(ss.str());
}

std::string solver_output_to_json(const SolverOutput& out) {
  std::string s = "{\n  \"x_hat\": ";
  append_vector(s, out.x_hat);
  if (out.u_hat) {
    s += ",\n  \"u_hat\": ";
    append_vector(s, *out.u_hat);
  }
  s += ",\n  \"residual_norms\": ";
  append_vector(s, out.residual_norms);
  s += ",\n  \"iterations\": " + std::to_string(out.iterations);
  s += ",\n  \"converged\": ";
  s += out.converged ? "true" : "false";
  s += ",\n  \"cost_trace\": [";
  for (size_t i = 0; i < out.cost_trace.size(); ++i) {
    if (i) s += ',';
    s += fmt(out.cost_trace[i]);
  }
  s += "]\n}\n";
  return s;
}

void save_solver_output(const SolverOutput& out, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open \"" + path + "\" for writing");
  f << solver_output_to_json(out);
}

std::string matrix_to_json(const Matrix& M) {
  std::string out = "{\"rows\": " + std::to_string(M.rows()) +
                    ", \"cols\": " + std::to_string(M.cols()) +
                    ", \"entries\": ";
  append_matrix_rows(out, M);
  out += "}\n";
  return out;
}

Matrix matrix_from_json(const std::string& text) {
  json j = parse_or_throw(text);
  Matrix M = matrix_from(require(j, "entries"), "entries");
  if (M.rows() != require(j, "rows").get<Eigen::Index>() ||
      M.cols() != require(j, "cols").get<Eigen::Index>())
    throw SchemaError("entries shape disagrees with rows/cols");
  return M;
}

Matrix load_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << f.rdbuf();
  return matrix_from_json(ss.str());
}

EquationSystem load_equation_system(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << f.rdbuf();
  json j = parse_or_throw(ss.str());
  EquationSystem sys;
  sys.C = matrix_from(require(j, "C"), "C");
  sys.d = vector_from(require(j, "d"), "d");
  sys.m = require(j, "m").get<int>();
  if (sys.d.size() != sys.C.rows())
    throw SchemaError("d length must equal the row count of C");
  return sys;
}

}  // namespace rsense
