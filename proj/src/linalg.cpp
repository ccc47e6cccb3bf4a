#include "combrec/linalg.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace combrec {

void require_finite(const Matrix& a, const char* name) {
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(name) + ": non-finite entries");
  }
}

void require_finite(const Vector& v, const char* name) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(name) + ": non-finite entries");
  }
}

double rank_rtol(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon();
}

LeastSquaresResult solve_ls(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) {
    throw std::invalid_argument("solve_ls: A.rows() != b.size()");
  }
  require_finite(a, "solve_ls: A");
  require_finite(b, "solve_ls: b");

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a.rows(), a.cols());
  cod.setThreshold(rank_rtol(a.rows(), a.cols()));
  cod.compute(a);

  LeastSquaresResult out;
  out.solution = cod.solve(b);
  out.residual_norm = (b - a * out.solution).norm();
  out.rank_deficient = cod.rank() < a.cols();
  return out;
}

Matrix pseudoinverse(const Matrix& a) {
  require_finite(a, "pseudoinverse: A");
  if (a.rows() < a.cols()) {
    // Full-row-rank case (the inverse of a tall full-rank matrix is wide):
    // pinv(A) = pinv(A^T)^T.
    return pseudoinverse(Matrix(a.transpose())).transpose();
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(a.rows(), a.cols());
  qr.setThreshold(rank_rtol(a.rows(), a.cols()));
  qr.compute(a);
  if (qr.rank() < a.cols()) {
    throw std::runtime_error("pseudoinverse: rank " + std::to_string(qr.rank()) +
                             " < cols " + std::to_string(a.cols()));
  }
  // Least-squares solve against I gives (A^T A)^{-1} A^T column by column.
  return qr.solve(Matrix::Identity(a.rows(), a.rows()));
}

Matrix orthogonal_projector(const Matrix& d1) {
  require_finite(d1, "orthogonal_projector: D1");
  Eigen::ColPivHouseholderQR<Matrix> qr(d1.rows(), d1.cols());
  qr.setThreshold(rank_rtol(d1.rows(), d1.cols()));
  qr.compute(d1);
  if (qr.rank() < d1.cols()) {
    throw std::runtime_error("orthogonal_projector: D1 rank deficient (rank " +
                             std::to_string(qr.rank()) + ")");
  }
  // I - Q1 Q1^T with Q1 the thin factor; equals I - D1 D1^+ and is symmetric
  // by construction.
  Matrix q1 = qr.householderQ() * Matrix::Identity(d1.rows(), d1.cols());
  Matrix p = Matrix::Identity(d1.rows(), d1.rows());
  p.noalias() -= q1 * q1.transpose();
  return p;
}

namespace {

// Least-squares coefficients of b on the columns of `a` listed in `subset`.
Vector subset_ls(const Matrix& a, const Vector& b, const std::vector<int>& subset) {
  Matrix sub(a.rows(), static_cast<Eigen::Index>(subset.size()));
  for (std::size_t k = 0; k < subset.size(); ++k) {
    sub.col(static_cast<Eigen::Index>(k)) = a.col(subset[k]);
  }
  return sub.colPivHouseholderQr().solve(b);
}

}  // namespace

LeastSquaresResult nnls_solve(const Matrix& a, const Vector& b, double tol,
                              int max_iter) {
  if (a.rows() != b.size()) {
    throw std::invalid_argument("nnls_solve: A.rows() != b.size()");
  }
  if (!(tol > 0.0) && tol != 0.0) {
    throw std::invalid_argument("nnls_solve: tol must be >= 0");
  }
  require_finite(a, "nnls_solve: A");
  require_finite(b, "nnls_solve: b");

  const auto n = a.cols();
  if (max_iter <= 0) max_iter = 3 * static_cast<int>(n);

  Vector x = Vector::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  std::vector<int> pset;
  Vector w = a.transpose() * b;

  auto result = [&](Vector sol) {
    LeastSquaresResult r;
    r.residual_norm = (b - a * sol).norm();
    r.solution = std::move(sol);
    return r;
  };

  int iters = 0;
  while (true) {
    // Select the most violated active coordinate (lowest index on ties).
    int best = -1;
    double best_w = tol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!passive[static_cast<std::size_t>(i)] && w[i] > best_w) {
        best_w = w[i];
        best = static_cast<int>(i);
      }
    }
    if (best < 0) break;  // KKT satisfied

    passive[static_cast<std::size_t>(best)] = true;
    pset.push_back(best);

    Vector z = subset_ls(a, b, pset);
    while (z.minCoeff() <= 0.0) {
      if (++iters > max_iter) {
        throw iteration_limit_error("nnls_solve: iteration cap exceeded",
                                    result(x));
      }
      // Step toward z until the first passive coordinate hits zero.
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < pset.size(); ++k) {
        const auto zi = z[static_cast<Eigen::Index>(k)];
        if (zi <= 0.0) {
          const double xi = x[pset[k]];
          alpha = std::min(alpha, xi / (xi - zi));
        }
      }
      for (std::size_t k = 0; k < pset.size(); ++k) {
        const int idx = pset[k];
        x[idx] += alpha * (z[static_cast<Eigen::Index>(k)] - x[idx]);
      }
      // Retire coordinates driven to (numerical) zero.
      const double zero_tol = 1e-12 * std::max(1.0, x.lpNorm<Eigen::Infinity>());
      std::vector<int> keep;
      for (std::size_t k = 0; k < pset.size(); ++k) {
        const int idx = pset[k];
        if (x[idx] <= zero_tol) {
          passive[static_cast<std::size_t>(idx)] = false;
          x[idx] = 0.0;
        } else {
          keep.push_back(idx);
        }
      }
      pset = std::move(keep);
      if (pset.empty()) break;
      z = subset_ls(a, b, pset);
    }
    for (std::size_t k = 0; k < pset.size(); ++k) {
      x[pset[k]] = z[static_cast<Eigen::Index>(k)];
    }
    w.noalias() = a.transpose() * (b - a * x);

    if (++iters > max_iter) {
      throw iteration_limit_error("nnls_solve: iteration cap exceeded",
                                  result(x));
    }
  }

  return result(x);
}

LeastSquaresResult lsi_solve(const Matrix& g1, const Vector& y,
                             Eigen::Index nonneg_count, double tol) {
  if (g1.rows() != y.size()) {
    throw std::invalid_argument("lsi_solve: G1.rows() != y.size()");
  }
  if (nonneg_count < 0 || nonneg_count > g1.cols()) {
    throw std::invalid_argument("lsi_solve: nonneg_count out of range");
  }
  require_finite(g1, "lsi_solve: G1");
  require_finite(y, "lsi_solve: y");

  if (g1.cols() == 0) {
    LeastSquaresResult empty;
    empty.solution = Vector(0);
    empty.residual_norm = y.norm();
    return empty;
  }

  if (tol <= 0.0) {
    tol = 1e-10 * (g1.transpose() * y).lpNorm<Eigen::Infinity>();
    if (tol <= 0.0) tol = 1e-14;
  }

  if (nonneg_count == 0) return solve_ls(g1, y);

  Eigen::ColPivHouseholderQR<Matrix> qr_full(g1.rows(), g1.cols());
  qr_full.setThreshold(rank_rtol(g1.rows(), g1.cols()));
  qr_full.compute(g1);
  if (qr_full.rank() < g1.cols()) {
    throw std::runtime_error("lsi_solve: G1 rank deficient (rank " +
                             std::to_string(qr_full.rank()) + ")");
  }

  const Matrix xc = g1.leftCols(nonneg_count);
  const auto free_count = g1.cols() - nonneg_count;

  if (free_count == 0) {
    auto r = nnls_solve(xc, y, tol);
    return r;
  }

  // Eliminate the free block: with P the projector onto the complement of
  // its column space, the constrained block solves NNLS on (P Xc, P y).
  const Matrix f = g1.rightCols(free_count);
  Eigen::HouseholderQR<Matrix> qr_f(f);
  Matrix q1 = qr_f.householderQ() * Matrix::Identity(f.rows(), free_count);

  Matrix pxc = xc;
  pxc.noalias() -= q1 * (q1.transpose() * xc);
  Vector py = y - q1 * (q1.transpose() * y);

  LeastSquaresResult nn = nnls_solve(pxc, py, tol);

  // Back-substitute the free block at the NNLS optimum.
  Vector resid_free = y - xc * nn.solution;
  Vector v = qr_f.solve(resid_free);

  LeastSquaresResult out;
  out.solution = Vector(g1.cols());
  out.solution.head(nonneg_count) = nn.solution;
  out.solution.tail(free_count) = v;
  out.residual_norm = (y - g1 * out.solution).norm();
  out.rank_deficient = false;
  return out;
}

}  // namespace combrec
