#include "combrec/lp.hpp"

#include <cmath>
#include <vector>

namespace combrec {

namespace {

constexpr double kPivotEps = 1e-11;

// One simplex phase on an explicit tableau. rows = constraint count,
// the objective lives in the last tableau row, the rhs in the last column.
// Bland's rule (lowest eligible index) guarantees termination.
LpStatus run_simplex(Matrix& t, std::vector<int>& basis, int cols,
                     int max_pivots) {
  const int rows = static_cast<int>(t.rows()) - 1;
  for (int pivot = 0; pivot < max_pivots; ++pivot) {
    int enter = -1;
    for (int j = 0; j < cols; ++j) {
      if (t(rows, j) < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return LpStatus::Optimal;

    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < rows; ++i) {
      if (t(i, enter) > kPivotEps) {
        const double ratio = t(i, cols) / t(i, enter);
        if (leave < 0 || ratio < best_ratio - kPivotEps ||
            (ratio < best_ratio + kPivotEps && basis[static_cast<std::size_t>(i)] <
                                                   basis[static_cast<std::size_t>(leave)])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) return LpStatus::Unbounded;

    const double piv = t(leave, enter);
    t.row(leave) /= piv;
    for (int i = 0; i <= rows; ++i) {
      if (i == leave) continue;
      const double f = t(i, enter);
      if (f != 0.0) t.row(i) -= f * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  return LpStatus::Error;
}

}  // namespace

LpSolution lp_solve_standard(const Matrix& a, const Vector& b, const Vector& c,
                             int max_pivots) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (b.size() != m || c.size() != n) {
    throw std::invalid_argument("lp_solve_standard: dimension mismatch");
  }
  if (max_pivots <= 0) max_pivots = 200 * (m + n) + 2000;

  // Tableau over [x | artificials | rhs], rows flipped so rhs >= 0.
  Matrix t = Matrix::Zero(m + 1, n + m + 1);
  for (int i = 0; i < m; ++i) {
    const double s = b[i] < 0.0 ? -1.0 : 1.0;
    t.block(i, 0, 1, n) = s * a.row(i);
    t(i, n + i) = 1.0;
    t(i, n + m) = s * b[i];
  }
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  // Phase I: minimize the sum of artificials.
  for (int i = 0; i < m; ++i) t(m, n + i) = 1.0;
  for (int i = 0; i < m; ++i) t.row(m) -= t.row(i);
  LpSolution out;
  LpStatus st = run_simplex(t, basis, n + m, max_pivots);
  if (st == LpStatus::Error) return out;
  if (t(m, n + m) < -1e-7) {
    out.status = LpStatus::Infeasible;
    return out;
  }

  // Drive any lingering artificial out of the basis; drop redundant rows.
  for (int i = 0; i < m; ++i) {
    if (basis[static_cast<std::size_t>(i)] >= n) {
      int enter = -1;
      for (int j = 0; j < n; ++j) {
        if (std::abs(t(i, j)) > kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) {
        t.row(i).setZero();  // redundant constraint
        continue;
      }
      const double piv = t(i, enter);
      t.row(i) /= piv;
      for (int r = 0; r <= m; ++r) {
        if (r == i) continue;
        const double f = t(r, enter);
        if (f != 0.0) t.row(r) -= f * t.row(i);
      }
      basis[static_cast<std::size_t>(i)] = enter;
    }
  }

  // Phase II on the original objective, artificial columns disabled.
  t.block(0, n, m + 1, m).setZero();
  t.row(m).setZero();
  t.block(m, 0, 1, n) = c.transpose();
  for (int i = 0; i < m; ++i) {
    const int bi = basis[static_cast<std::size_t>(i)];
    if (bi < n && c[bi] != 0.0) t.row(m) -= c[bi] * t.row(i);
  }
  st = run_simplex(t, basis, n, max_pivots);
  if (st == LpStatus::Error || st == LpStatus::Unbounded) {
    out.status = st;
    return out;
  }

  out.status = LpStatus::Optimal;
  out.x = Vector::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int bi = basis[static_cast<std::size_t>(i)];
    if (bi < n) out.x[bi] = t(i, n + m);
  }
  out.objective = c.dot(out.x);
  return out;
}

std::optional<Vector> lp_find_point(const Matrix& ineq, const Vector& ineq_rhs,
                                    const Matrix& eq, const Vector& eq_rhs) {
  const int dim = static_cast<int>(ineq.rows());
  const int n_ineq = static_cast<int>(ineq.cols());
  const int n_eq = static_cast<int>(eq.cols());
  if (ineq_rhs.size() != n_ineq || eq_rhs.size() != n_eq ||
      (n_eq > 0 && eq.rows() != dim)) {
    throw std::invalid_argument("lp_find_point: dimension mismatch");
  }

  // Standard form over h = p - q with surplus variables on the inequalities.
  const int rows = n_ineq + n_eq;
  const int cols = 2 * dim + n_ineq;
  Matrix a = Matrix::Zero(rows, cols);
  Vector b(rows);
  for (int j = 0; j < n_ineq; ++j) {
    a.block(j, 0, 1, dim) = ineq.col(j).transpose();
    a.block(j, dim, 1, dim) = -ineq.col(j).transpose();
    a(j, 2 * dim + j) = -1.0;
    b[j] = ineq_rhs[j];
  }
  for (int j = 0; j < n_eq; ++j) {
    a.block(n_ineq + j, 0, 1, dim) = eq.col(j).transpose();
    a.block(n_ineq + j, dim, 1, dim) = -eq.col(j).transpose();
    b[n_ineq + j] = eq_rhs[j];
  }

  LpSolution sol = lp_solve_standard(a, b, Vector::Zero(cols));
  if (sol.status == LpStatus::Error) {
    throw std::runtime_error("lp_find_point: simplex failed to converge");
  }
  if (sol.status != LpStatus::Optimal) return std::nullopt;
  return Vector(sol.x.head(dim) - sol.x.segment(dim, dim));
}

}  // namespace combrec
