#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <combrec/linalg.hpp>
#include <combrec/rng.hpp>

using combrec::Matrix;
using combrec::Rng;
using combrec::Vector;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = rng.normal();
  }
  return a;
}

}  // namespace

TEST_CASE("solve_ls on the identity") {
  Vector b(3);
  b << 1, 2, 3;
  auto r = combrec::solve_ls(Matrix::Identity(3, 3), b);
  CHECK((r.solution - b).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.residual_norm == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(r.rank_deficient);
}

TEST_CASE("solve_ls projects onto orthonormal columns") {
  // Orthonormalize two random columns.
  Matrix raw = random_matrix(4, 2, 7);
  Eigen::HouseholderQR<Matrix> qr(raw);
  Matrix q = qr.householderQ() * Matrix::Identity(4, 2);
  Vector b = 2.0 * q.col(0) - q.col(1);
  auto r = combrec::solve_ls(q, b);
  CHECK(r.solution[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.solution[1] == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(r.residual_norm < 1e-10);
}

TEST_CASE("solve_ls matches the normal-equations oracle") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Matrix a = random_matrix(8, 5, seed);
    Vector b = random_matrix(8, 1, seed + 100).col(0);
    Vector oracle = (a.transpose() * a).inverse() * a.transpose() * b;
    auto r = combrec::solve_ls(a, b);
    CHECK((r.solution - oracle).norm() < 1e-8);
    // Residual orthogonal to the range.
    CHECK((a.transpose() * (b - a * r.solution)).lpNorm<Eigen::Infinity>() <
          1e-8 * b.norm());
  }
}

TEST_CASE("solve_ls flags rank deficiency and keeps the min-norm solution") {
  Matrix a(4, 3);
  a.col(0) = random_matrix(4, 1, 3).col(0);
  a.col(1) = a.col(0);
  a.col(2) = random_matrix(4, 1, 4).col(0);
  Vector b = random_matrix(4, 1, 5).col(0);
  auto r = combrec::solve_ls(a, b);
  CHECK(r.rank_deficient);
  CHECK((a.transpose() * (b - a * r.solution)).lpNorm<Eigen::Infinity>() <
        1e-8 * b.norm());
  // Duplicated columns share the weight evenly in the min-norm solution.
  CHECK(r.solution[0] == doctest::Approx(r.solution[1]).epsilon(1e-9));
}

TEST_CASE("solve_ls input validation") {
  CHECK_THROWS_AS(combrec::solve_ls(Matrix::Identity(3, 3), Vector::Ones(2)),
                  std::invalid_argument);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(combrec::solve_ls(bad, Vector::Ones(2)), std::invalid_argument);
}

TEST_CASE("pseudoinverse basics") {
  CHECK((combrec::pseudoinverse(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4))
            .norm() < 1e-12);
  Matrix col(2, 1);
  col << 3, 4;
  Matrix pinv = combrec::pseudoinverse(col);
  CHECK(pinv(0, 0) == doctest::Approx(3.0 / 25.0).epsilon(1e-12));
  CHECK(pinv(0, 1) == doctest::Approx(4.0 / 25.0).epsilon(1e-12));
}

TEST_CASE("pseudoinverse satisfies the Moore-Penrose identities") {
  Matrix a = random_matrix(10, 4, 11);
  Matrix p = combrec::pseudoinverse(a);
  CHECK((a * p * a - a).norm() < 1e-8);
  CHECK((p * a * p - p).norm() < 1e-8);
  CHECK(((a * p).transpose() - a * p).norm() < 1e-8);
  CHECK(((p * a).transpose() - p * a).norm() < 1e-8);
  CHECK((p * a - Matrix::Identity(4, 4)).norm() < 1e-8);
  // Involution on full-rank inputs.
  CHECK((combrec::pseudoinverse(p) - a).norm() < 1e-7);
}

TEST_CASE("pseudoinverse rejects rank-deficient input naming the rank") {
  Matrix a(3, 2);
  a.col(0) = Vector::Ones(3);
  a.col(1) = 2.0 * Vector::Ones(3);
  try {
    combrec::pseudoinverse(a);
    FAIL("expected exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("rank 1") != std::string::npos);
  }
}

TEST_CASE("orthogonal_projector closed forms") {
  Matrix e1 = Matrix::Zero(3, 1);
  e1(0, 0) = 1.0;
  Matrix p = combrec::orthogonal_projector(e1);
  Matrix expected = Matrix::Zero(3, 3);
  expected(1, 1) = expected(2, 2) = 1.0;
  CHECK((p - expected).norm() < 1e-12);

  Matrix full = Matrix::Identity(5, 5);
  CHECK(combrec::orthogonal_projector(full).norm() < 1e-10);
}

TEST_CASE("orthogonal_projector annihilates and is idempotent") {
  Matrix d1 = random_matrix(6, 2, 21);
  Matrix p = combrec::orthogonal_projector(d1);
  CHECK((p * d1).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((p * p - p).norm() < 1e-8);
  CHECK((p - p.transpose()).norm() < 1e-10);
  Rng rng(22);
  for (int t = 0; t < 20; ++t) {
    Vector x(6);
    for (int i = 0; i < 6; ++i) x[i] = rng.normal();
    CHECK(std::abs(d1.col(0).dot(p * x)) < 1e-9);
    CHECK(std::abs(d1.col(1).dot(p * x)) < 1e-9);
  }
  Matrix dup(6, 2);
  dup.col(0) = d1.col(0);
  dup.col(1) = d1.col(0);
  CHECK_THROWS_AS(combrec::orthogonal_projector(dup), std::runtime_error);
}

TEST_CASE("nnls clips the negative part on the identity") {
  Vector b(2);
  b << 1, -1;
  auto r = combrec::nnls_solve(Matrix::Identity(2, 2), b, 1e-12);
  CHECK(r.solution[0] == doctest::Approx(1.0));
  CHECK(r.solution[1] == doctest::Approx(0.0));
  CHECK(r.residual_norm == doctest::Approx(1.0));

  Vector c(3);
  c << 2, 3, 0.5;
  auto r2 = combrec::nnls_solve(Matrix::Identity(3, 3), c, 1e-12);
  CHECK((r2.solution - c).norm() < 1e-12);
}

TEST_CASE("nnls recovers planted non-negative solutions") {
  for (std::uint64_t seed = 31; seed < 36; ++seed) {
    Matrix a = random_matrix(10, 5, seed);
    Rng rng(seed + 500);
    Vector planted(5);
    for (int i = 0; i < 5; ++i) planted[i] = rng.uniform01();
    Vector b = a * planted;
    auto r = combrec::nnls_solve(a, b, 1e-12);
    CHECK((r.solution - planted).norm() < 1e-8);

    // KKT certificate.
    Vector grad = a.transpose() * (b - a * r.solution);
    for (int i = 0; i < 5; ++i) {
      if (r.solution[i] > 0) {
        CHECK(std::abs(grad[i]) < 1e-8);
      } else {
        CHECK(grad[i] < 1e-8);
      }
    }
  }
}

TEST_CASE("nnls objective beats random feasible vectors") {
  Matrix a = random_matrix(8, 6, 41);
  Vector b = random_matrix(8, 1, 42).col(0);
  auto r = combrec::nnls_solve(a, b, 1e-10);
  Rng rng(43);
  for (int t = 0; t < 100; ++t) {
    Vector cand(6);
    for (int i = 0; i < 6; ++i) cand[i] = rng.uniform01() * 2.0;
    CHECK((b - a * cand).norm() >= r.residual_norm - 1e-9);
  }
}

TEST_CASE("lsi with no constraints equals plain least squares") {
  Matrix g = random_matrix(9, 4, 51);
  Vector y = random_matrix(9, 1, 52).col(0);
  auto ls = combrec::solve_ls(g, y);
  auto lsi = combrec::lsi_solve(g, y, 0);
  CHECK((ls.solution - lsi.solution).norm() < 1e-10);
}

TEST_CASE("lsi clamps constrained coordinates") {
  Vector y(2);
  y << -1, 2;
  auto r = combrec::lsi_solve(Matrix::Identity(2, 2), y, 2);
  CHECK(r.solution[0] == doctest::Approx(0.0));
  CHECK(r.solution[1] == doctest::Approx(2.0));
}

TEST_CASE("lsi recovers planted partially non-negative solutions") {
  for (std::uint64_t seed = 61; seed < 66; ++seed) {
    Matrix g = random_matrix(12, 6, seed);
    Rng rng(seed + 700);
    Vector planted(6);
    for (int i = 0; i < 3; ++i) planted[i] = 0.2 + rng.uniform01();
    for (int i = 3; i < 6; ++i) planted[i] = rng.uniform(-1.0, 1.0);
    Vector y = g * planted;
    auto r = combrec::lsi_solve(g, y, 3);
    CHECK((r.solution - planted).norm() < 1e-8);
  }
}

TEST_CASE("lsi satisfies its KKT system on noisy data") {
  Matrix g = random_matrix(12, 6, 71);
  Vector y = random_matrix(12, 1, 72).col(0) * 2.0;
  auto r = combrec::lsi_solve(g, y, 3);
  Vector grad = g.transpose() * (y - g * r.solution);
  const double tol = 1e-6 * std::max(1.0, y.norm());
  for (int i = 0; i < 3; ++i) {
    CHECK(r.solution[i] >= -1e-12);
    if (r.solution[i] > 1e-10) {
      CHECK(std::abs(grad[i]) < tol);
    } else {
      CHECK(grad[i] < tol);  // pushing up would leave the feasible set
    }
  }
  for (int i = 3; i < 6; ++i) CHECK(std::abs(grad[i]) < tol);

  // With every constraint inactive at the optimum, LSI equals LS.
  const Vector half = Vector::Constant(6, 0.5);
  Vector interior = g * half;
  auto ls = combrec::solve_ls(g, interior);
  auto lsi = combrec::lsi_solve(g, interior, 3);
  CHECK((ls.solution - lsi.solution).norm() < 1e-9);
}

TEST_CASE("lsi rejects rank-deficient systems") {
  Matrix g(6, 3);
  g.col(0) = random_matrix(6, 1, 81).col(0);
  g.col(1) = g.col(0) * 2.0;
  g.col(2) = random_matrix(6, 1, 82).col(0);
  CHECK_THROWS_AS(combrec::lsi_solve(g, Vector::Ones(6), 1), std::runtime_error);
}
