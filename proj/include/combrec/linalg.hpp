#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace combrec {

// Dense storage is Eigen's default: column-major doubles.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Thrown when an iterative kernel hits its iteration cap; carries the best
// iterate found so far.
struct LeastSquaresResult {
  Vector solution;
  double residual_norm = 0.0;
  bool rank_deficient = false;
};

class iteration_limit_error : public std::runtime_error {
 public:
  iteration_limit_error(const std::string& what, LeastSquaresResult best)
      : std::runtime_error(what), best_iterate(std::move(best)) {}
  LeastSquaresResult best_iterate;
};

// Throws std::invalid_argument unless all entries are finite.
void require_finite(const Matrix& a, const char* name);
void require_finite(const Vector& v, const char* name);

// Rank threshold used everywhere a numerical rank decision is made:
// pivots below max(rows,cols) * eps relative to the largest pivot count as zero.
double rank_rtol(Eigen::Index rows, Eigen::Index cols);

// Minimum-norm least squares via a rank-revealing orthogonal factorization
// (column-pivoted Householder QR completed to an orthogonal decomposition).
LeastSquaresResult solve_ls(const Matrix& a, const Vector& b);

// Moore-Penrose pseudoinverse (A^T A)^{-1} A^T of a full-column-rank matrix.
// Throws std::runtime_error naming the numerical rank when deficient.
Matrix pseudoinverse(const Matrix& a);

// P = I - D1 D1^+, the projector onto the orthogonal complement of the
// column space of D1. Requires full column rank.
Matrix orthogonal_projector(const Matrix& d1);

// Lawson-Hanson active-set NNLS: min ||b - A x||_2 subject to x >= 0.
// KKT at exit: passive coordinates have |a_i^T r| <= tol, active (zero)
// coordinates have a_i^T r <= tol. max_iter 0 means 3 * cols.
LeastSquaresResult nnls_solve(const Matrix& a, const Vector& b, double tol,
                              int max_iter = 0);

// Least squares with the first nonneg_count coefficients constrained >= 0.
// Solved by eliminating the unconstrained block through its normal equations,
// leaving an NNLS problem in the constrained block. Requires g1 to have full
// column rank. tol 0 selects 1e-10 * ||g1^T y||_inf.
LeastSquaresResult lsi_solve(const Matrix& g1, const Vector& y,
                             Eigen::Index nonneg_count, double tol = 0.0);

}  // namespace combrec
