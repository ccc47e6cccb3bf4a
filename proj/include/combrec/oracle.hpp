#pragma once

#include "combrec/dictgen.hpp"
#include "combrec/solution.hpp"

namespace combrec {

struct Ml0Result {
  SparseSolution solution;
  bool unique = false;
};

// Exhaustive minimum-support search: enumerates supports of size 0..s_max in
// colexicographic order within each size, solving the sign-constrained least
// squares on each, and returns the first (smallest, lowest-ranked) support
// whose residual is <= tol. `unique` reports whether it was the only feasible
// support of that size, up to zero-coefficient degeneracies. Refuses to
// enumerate more than 2e6 supports. threads > 1 enumerates chunks in
// parallel with a deterministic merge.
Ml0Result ml0_search(const CombinedDictionary& g, const Vector& y, int s_max,
                     double tol, int threads = 1);

// Decides whether { a : y = X a, a >= 0 } is a singleton, by finding one
// solution via NNLS and then hunting for a feasible solution with a
// different support among all supports of size <= s_max. Solutions closer
// than 1e-6 in l2 are considered the same.
bool nn_singleton_check(const Dictionary& x, const Vector& y, int s_max,
                        double tol);

struct FeasibilityCertificate {
  bool feasible = false;
  Vector h;
};

// Feasibility of  h^T X >= tol * 1  with  h^T D1 = 0; the certificate needed
// for NNLS recovery after projecting out a known general support.
FeasibilityCertificate lemma3_feasibility(const Dictionary& x, const Matrix& d1,
                                          double tol);

}  // namespace combrec
