#pragma once

#include "combrec/dictgen.hpp"
#include "combrec/solution.hpp"

namespace combrec {

struct PathSolverConfig {
  double residual_tol = 1e-6;
  int max_breakpoints = 0;  // <= 0 selects 4 * min(rows, cols)
  double kkt_tol = 1e-6;
};

// Thrown when the homotopy path exceeds its breakpoint budget; carries the
// partial solution at the last completed breakpoint.
class path_limit_error : public std::runtime_error {
 public:
  path_limit_error(const std::string& what, SparseSolution partial)
      : std::runtime_error(what), partial_solution(std::move(partial)) {}
  SparseSolution partial_solution;
};

// Non-negative LASSO homotopy: traces the optimum of
//   min 0.5 ||y - A a||^2 + lambda 1^T a,  a >= 0
// from lambda_max downward, with the LASSO modification (active coefficients
// hitting zero leave the set), stopping once ||y - A a|| <= residual_tol.
// At exit the lambda-KKT system holds at the final lambda.
SparseSolution nn_homotopy_solve(const Dictionary& a, const Vector& y,
                                 const PathSolverConfig& cfg = {});

// Basis pursuit via the column-doubled reduction [G, -G]; the two halves are
// folded back into a signed solution.
SparseSolution bp_solve(const Dictionary& g, const Vector& y,
                        const PathSolverConfig& cfg = {});

// l1 pursuit with the X block constrained non-negative, via the reduction
// [X, D, -D]; the D halves are folded back.
SparseSolution comb_bp_solve(const CombinedDictionary& g, const Vector& y,
                             const PathSolverConfig& cfg = {});

struct KktReport {
  bool certified = false;
  double max_violation = 0.0;
};

// Independent optimality certificate for the sign-constrained l1 problem at
// the residual level of `delta`: active coefficients must see a common
// correlation level, no inactive atom may exceed it, and the X block must be
// non-negative.
KktReport verify_kkt(const CombinedDictionary& g, const Vector& y,
                     const Vector& delta, double tol);

}  // namespace combrec
