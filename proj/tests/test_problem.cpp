#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rsense/problem.hpp"
#include "rsense/rng.hpp"
#include "rsense/serialize.hpp"

using namespace rsense;

namespace {

SensingProblem tiny_problem() {
  Matrix A(4, 2);
  A << 1, 0, 0, 1, 2, 0, 0, 2;
  Vector b(4);
  b << 1, 2, 3, 4;
  return SensingProblem(2, 2, 2, A, b);
}

std::string tmp_path(const char* name) {
  return std::string("/tmp/rsense_unit_") + name;
}

}  // namespace

TEST_CASE("constructor validates dimensions and finiteness") {
  Matrix A = Matrix::Identity(4, 2);
  Vector b = Vector::Ones(4);
  CHECK_THROWS_AS(SensingProblem(0, 2, 2, A, b), ValidationError);
  CHECK_THROWS_AS(SensingProblem(2, 0, 2, A, b), ValidationError);
  CHECK_THROWS_AS(SensingProblem(2, 2, 0, A, b), ValidationError);
  CHECK_THROWS_AS(SensingProblem(2, 2, 3, A, b), ValidationError);  // rows
  CHECK_THROWS_AS(SensingProblem(3, 2, 2, A, b), ValidationError);  // cols
  CHECK_THROWS_AS(SensingProblem(2, 2, 2, A, Vector::Ones(3)), ValidationError);
  Matrix bad = A;
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SensingProblem(2, 2, 2, bad, b), ValidationError);
  Vector badb = b;
  badb(0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SensingProblem(2, 2, 2, A, badb), ValidationError);
}

TEST_CASE("block accessors slice the stacked system") {
  const SensingProblem p = tiny_problem();
  CHECK(p.n() == 2);
  CHECK(p.m() == 2);
  CHECK(p.k() == 2);
  CHECK(p.block_A(1)(0, 0) == 2.0);
  CHECK(p.block_b(1)(1) == 4.0);
  Vector x(2);
  x << 1, 2;
  // Residuals: block 0 -> (0, 0), block 1 -> (1, 0).
  const Vector norms = p.block_residual_norms(x);
  CHECK(norms(0) == doctest::Approx(0.0));
  CHECK(norms(1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(p.block_residual_norms(Vector::Ones(3)), ValidationError);
}

TEST_CASE("from_blocks stacks in order and validates shapes") {
  std::vector<Matrix> As = {Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)};
  std::vector<Vector> bs = {Vector::Ones(2), Vector::Zero(2)};
  const SensingProblem p = SensingProblem::from_blocks(As, bs);
  CHECK(p.A()(2, 0) == 2.0);
  CHECK(p.b()(1) == 1.0);

  CHECK_THROWS_AS(SensingProblem::from_blocks({}, {}), ValidationError);
  std::vector<Matrix> ragged = {Matrix::Identity(2, 2), Matrix::Identity(3, 2)};
  std::vector<Vector> bs3 = {Vector::Ones(2), Vector::Ones(3)};
  CHECK_THROWS_AS(SensingProblem::from_blocks(ragged, bs3), ValidationError);
  std::vector<Vector> wrong_b = {Vector::Ones(2), Vector::Ones(3)};
  CHECK_THROWS_AS(SensingProblem::from_blocks(As, wrong_b), ValidationError);
}

TEST_CASE("ground-truth attachment is validated") {
  SensingProblem p = tiny_problem();
  GroundTruth t;
  t.x0 = Vector::Ones(2);
  t.reliable_set = {0, 1};
  p.set_truth(t);
  CHECK(p.truth().has_value());

  GroundTruth bad = t;
  bad.x0 = Vector::Ones(3);
  CHECK_THROWS_AS(p.set_truth(bad), ValidationError);
  bad = t;
  bad.reliable_set = {};
  CHECK_THROWS_AS(p.set_truth(bad), ValidationError);
  bad = t;
  bad.reliable_set = {1, 0};
  CHECK_THROWS_AS(p.set_truth(bad), ValidationError);
  bad = t;
  bad.reliable_set = {0, 2};
  CHECK_THROWS_AS(p.set_truth(bad), ValidationError);
  bad = t;
  bad.reliable_set = {0, 0};
  CHECK_THROWS_AS(p.set_truth(bad), ValidationError);
  bad = t;
  bad.sigma = -1.0;
  CHECK_THROWS_AS(p.set_truth(bad), ValidationError);
  p.set_truth(std::nullopt);
  CHECK(!p.truth().has_value());
}

TEST_CASE("zero padding preserves every block residual norm") {
  RngStream rng(71, 0);
  std::vector<Matrix> As = {rng.gaussian_matrix(1, 3), rng.gaussian_matrix(4, 3),
                            rng.gaussian_matrix(2, 3)};
  std::vector<Vector> bs = {rng.gaussian_vector(1), rng.gaussian_vector(4),
                            rng.gaussian_vector(2)};
  const SensingProblem p = pad_to_uniform(As, bs);
  CHECK(p.m() == 4);
  CHECK(p.k() == 3);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector x = rng.gaussian_vector(3);
    const Vector norms = p.block_residual_norms(x);
    for (int i = 0; i < 3; ++i)
      CHECK(norms(i) == doctest::Approx((bs[i] - As[i] * x).norm())
                            .epsilon(1e-12));
  }

  std::vector<Matrix> mixed_cols = {Matrix::Identity(2, 3), Matrix::Identity(2, 2)};
  std::vector<Vector> two = {Vector::Ones(2), Vector::Ones(2)};
  CHECK_THROWS_AS(pad_to_uniform(mixed_cols, two), ValidationError);
  std::vector<Matrix> one_block = {Matrix::Identity(2, 3)};
  std::vector<Vector> wrong_height = {Vector::Ones(3)};
  CHECK_THROWS_AS(pad_to_uniform(one_block, wrong_height), ValidationError);
}

TEST_CASE("solver configuration bounds") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.lambda = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.delta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.rho = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.abs_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.rel_tol = -1e-9;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("penalty heuristic scales as factor * sigma * sqrt(m)") {
  CHECK(lambda_for_sigma(2.0, 4, 1.0) == doctest::Approx(4.0));
  CHECK(lambda_for_sigma(1.0, 9) == doctest::Approx(1.34 * 3.0));
  CHECK_THROWS_AS(lambda_for_sigma(0.0, 4), ValidationError);
  CHECK_THROWS_AS(lambda_for_sigma(1.0, 0), ValidationError);
}

TEST_CASE("outlier model names round trip") {
  for (OutlierModel m : {OutlierModel::kNoiseFreeRandom,
                         OutlierModel::kGaussianOutlier,
                         OutlierModel::kLaplacianOutlier})
    CHECK(outlier_model_from_name(outlier_model_name(m)) == m);
  CHECK_THROWS_AS(outlier_model_from_name("cauchy"), ValidationError);
}

TEST_CASE("problem JSON round trip is byte-stable and lossless") {
  RngStream rng(72, 0);
  Matrix A = rng.gaussian_matrix(6, 2);
  A(0, 0) = 1.0 / 3.0;  // value without a short decimal form
  Vector b = rng.gaussian_vector(6);
  b(0) = 0.1;
  GroundTruth t;
  t.x0 = rng.gaussian_vector(2);
  t.reliable_set = {0, 2};
  t.sigma = 0.25;
  t.model = OutlierModel::kGaussianOutlier;
  const SensingProblem p(2, 2, 3, A, b, t);

  const std::string text = problem_to_json(p);
  const SensingProblem q = problem_from_json(text);
  CHECK(problem_to_json(q) == text);  // byte-identical second pass
  CHECK(q.A()(0, 0) == 1.0 / 3.0);    // 17 significant digits are lossless
  CHECK(q.b()(0) == 0.1);
  CHECK(q.truth()->reliable_set == std::vector<int>{0, 2});
  CHECK(q.truth()->model == OutlierModel::kGaussianOutlier);

  // Stored support indices are 1-based on disk.
  CHECK(text.find("\"reliable_set\": [1,3]") != std::string::npos);
  // The version marker leads the document.
  CHECK(text.find("\"format_version\"") < text.find("\"n\""));
}

TEST_CASE("malformed problem documents are rejected with context") {
  const std::string text = problem_to_json(tiny_problem());

  const std::string truncated = text.substr(0, text.size() / 2);
  bool threw = false;
  try {
    problem_from_json(truncated);
  } catch (const ParseError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
  CHECK(threw);

  CHECK_THROWS_AS(problem_from_json("[1,2,3]"), SchemaError);
  CHECK_THROWS_AS(problem_from_json("{\"n\": 2}"), SchemaError);

  std::string wrong_version = text;
  const auto pos = wrong_version.find(": 1,");
  wrong_version.replace(pos, 4, ": 7,");
  CHECK_THROWS_AS(problem_from_json(wrong_version), SchemaError);

  // Structurally fine but inconsistent shape.
  std::string bad_block = text;
  const auto kpos = bad_block.find("\"k\": 2");
  bad_block.replace(kpos, 6, "\"k\": 3");
  CHECK_THROWS_AS(problem_from_json(bad_block), SchemaError);
}

TEST_CASE("problem files round trip through disk") {
  const std::string path = tmp_path("problem.json");
  const SensingProblem p = tiny_problem();
  save_problem(p, path);
  const SensingProblem q = load_problem(path);
  CHECK(problem_to_json(q) == problem_to_json(p));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_problem(path), std::runtime_error);
}

TEST_CASE("matrix documents round trip") {
  RngStream rng(73, 0);
  const Matrix M = rng.gaussian_matrix(3, 4);
  const Matrix back = matrix_from_json(matrix_to_json(M));
  CHECK(back == M);
  CHECK_THROWS_AS(matrix_from_json("{\"rows\": 2, \"cols\": 2, \"entries\": [[1,2]]}"),
                  SchemaError);
  CHECK_THROWS_AS(matrix_from_json("{\"entries\": [[1,2],[3]]}"), SchemaError);
}

TEST_CASE("solver output document carries all fields") {
  SolverOutput out;
  out.x_hat = Vector::Ones(2);
  out.u_hat = Vector::Zero(4);
  out.residual_norms = Vector::Ones(2);
  out.cost_trace = {3.0, 2.0, 1.5};
  out.iterations = 3;
  out.converged = true;
  const std::string s = solver_output_to_json(out);
  for (const char* key : {"\"x_hat\"", "\"u_hat\"", "\"residual_norms\"",
                          "\"iterations\": 3", "\"converged\": true",
                          "\"cost_trace\""})
    CHECK(s.find(key) != std::string::npos);
  SolverOutput no_u = out;
  no_u.u_hat.reset();
  CHECK(solver_output_to_json(no_u).find("u_hat") == std::string::npos);
}

TEST_CASE("equation-system files load with shape checks") {
  const std::string path = tmp_path("eqsys.json");
  {
    std::ofstream f(path);
    f << "{\"C\": [[1,2],[3,4],[5,6]], \"d\": [1,2,3], \"m\": 4}\n";
  }
  const EquationSystem sys = load_equation_system(path);
  CHECK(sys.C.rows() == 3);
  CHECK(sys.C(2, 1) == 6.0);
  CHECK(sys.d(1) == 2.0);
  CHECK(sys.m == 4);
  {
    std::ofstream f(path);
    f << "{\"C\": [[1,2]], \"d\": [1,2], \"m\": 2}\n";
  }
  CHECK_THROWS_AS(load_equation_system(path), SchemaError);
  std::remove(path.c_str());
}
