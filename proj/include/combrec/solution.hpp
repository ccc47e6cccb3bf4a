#pragma once

#include <string>
#include <vector>

#include "combrec/linalg.hpp"

namespace combrec {

enum class Termination { Residual, MaxIters, Stalled };

std::string to_string(Termination t);

// Either bound may be disabled (max_iters <= 0 means "rows of the system",
// residual_tol < 0 is rejected).
struct StoppingCriteria {
  int max_iters = 0;
  double residual_tol = 1e-6;
};

struct SparseSolution {
  Vector delta;                 // full-length coefficient vector
  std::vector<int> support_x;   // indices into the non-negative block, in selection order
  std::vector<int> support_d;   // indices into the general block (global indices)
  double residual_norm = 0.0;
  int iterations = 0;
  Termination termination = Termination::Residual;
};

}  // namespace combrec
