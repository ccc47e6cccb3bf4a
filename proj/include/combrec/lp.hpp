#pragma once

#include <optional>

#include "combrec/linalg.hpp"

namespace combrec {

enum class LpStatus { Optimal, Infeasible, Unbounded, Error };

struct LpSolution {
  LpStatus status = LpStatus::Error;
  Vector x;            // valid when status == Optimal
  double objective = 0.0;
};

// Two-phase dense tableau simplex with Bland's rule for
//   min c^T x  subject to  A x = b,  x >= 0.
// Sized for the desk-scale feasibility problems in this library.
LpSolution lp_solve_standard(const Matrix& a, const Vector& b, const Vector& c,
                             int max_pivots = 0);

// Feasibility of the free-variable system
//   ineq^T h >= ineq_rhs   (componentwise),
//   eq^T h   =  eq_rhs     (componentwise, eq may be empty),
// returning a certificate h when one exists. Used for membership in the
// class of matrices whose row span meets the positive orthant.
std::optional<Vector> lp_find_point(const Matrix& ineq, const Vector& ineq_rhs,
                                    const Matrix& eq, const Vector& eq_rhs);

}  // namespace combrec
