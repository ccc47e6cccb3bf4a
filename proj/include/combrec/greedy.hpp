#pragma once

#include "combrec/dictgen.hpp"
#include "combrec/solution.hpp"

namespace combrec {

// Classic orthogonal matching pursuit: select by largest absolute
// correlation, refit by least squares, repeat.
SparseSolution omp_solve(const Dictionary& g, const Vector& y,
                         const StoppingCriteria& stop);

// Non-negative variant: select by largest positive correlation, refit by
// NNLS; all coefficients stay >= 0. Stalls when no positive correlation
// remains above the residual tolerance.
SparseSolution nn_omp_solve(const Dictionary& x, const Vector& y,
                            const StoppingCriteria& stop);

struct CombOmpOptions {
  // Sign-constrain the X block in the per-iteration refit. Off by default:
  // support selection is what drives recovery, and the unconstrained refit
  // is cheaper.
  bool constrained_update = false;
  // Final refit over the selected support with the X block constrained.
  bool debias = false;
};

// Greedy pursuit of a combined representation: X-block candidates compete
// with their positive correlation, D-block candidates with their absolute
// correlation; the larger wins the iteration (X wins exact ties, lowest
// index wins within a block).
SparseSolution comb_omp_solve(const CombinedDictionary& g, const Vector& y,
                              const StoppingCriteria& stop,
                              const CombOmpOptions& opts = {});

}  // namespace combrec
