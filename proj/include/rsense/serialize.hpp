#pragma once

#include <string>

#include "rsense/problem.hpp"

namespace rsense {

// Parse failure; message carries the byte offset reported by the parser.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Structurally valid JSON that does not satisfy the schema.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Canonical JSON encoding: fixed key order, reals with 17 significant digits
// (lossless for doubles), row-major entry arrays, 1-based reliable_set.
// save(load(save(p))) is byte-identical to save(p).
std::string problem_to_json(const SensingProblem& p);
SensingProblem problem_from_json(const std::string& text);

void save_problem(const SensingProblem& p, const std::string& path);
SensingProblem load_problem(const std::string& path);

std::string solver_output_to_json(const SolverOutput& out);
void save_solver_output(const SolverOutput& out, const std::string& path);

// Free-standing dense matrix file: {"rows":r,"cols":c,"entries":[[...],...]}.
std::string matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const std::string& text);
Matrix load_matrix(const std::string& path);

// Equation-system file {"C":[[...]],"d":[...],"m":int} for the reduction tool.
struct EquationSystem {
  Matrix C;
  Vector d;
  int m = 2;
};
EquationSystem load_equation_system(const std::string& path);

}  // namespace rsense
