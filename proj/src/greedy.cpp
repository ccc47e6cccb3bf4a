#include "combrec/greedy.hpp"

#include <cmath>
#include <limits>

namespace combrec {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Residual: return "RESIDUAL";
    case Termination::MaxIters: return "MAX_ITERS";
    case Termination::Stalled: return "STALLED";
  }
  return "?";
}

namespace {

int resolve_max_iters(const StoppingCriteria& stop, Eigen::Index rows) {
  if (stop.residual_tol < 0.0) {
    throw std::invalid_argument("StoppingCriteria: residual_tol must be >= 0");
  }
  return stop.max_iters > 0 ? stop.max_iters : static_cast<int>(rows);
}

Matrix gather(const Matrix& a, const std::vector<int>& idx) {
  Matrix sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    sub.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
  }
  return sub;
}

}  // namespace

SparseSolution omp_solve(const Dictionary& g, const Vector& y,
                         const StoppingCriteria& stop) {
  require_finite(y, "omp_solve: y");
  if (g.rows() != y.size()) throw std::invalid_argument("omp_solve: size mismatch");
  const int max_iters = resolve_max_iters(stop, g.rows());

  SparseSolution sol;
  sol.delta = Vector::Zero(g.size());
  Vector r = y;
  sol.residual_norm = r.norm();
  std::vector<bool> chosen(static_cast<std::size_t>(g.size()), false);
  std::vector<int> support;

  while (sol.residual_norm > stop.residual_tol && sol.iterations < max_iters &&
         static_cast<Eigen::Index>(support.size()) < g.size()) {
    const Vector corr = g.atoms().transpose() * r;
    int best = -1;
    double best_val = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (chosen[static_cast<std::size_t>(i)]) continue;
      const double v = std::abs(corr[i]);
      if (best < 0 || v > best_val) {
        best = static_cast<int>(i);
        best_val = v;
      }
    }
    if (best < 0 || best_val == 0.0) {
      sol.termination = Termination::Stalled;
      return sol;
    }
    support.push_back(best);
    chosen[static_cast<std::size_t>(best)] = true;

    const auto fit = solve_ls(gather(g.atoms(), support), y);
    if (fit.rank_deficient) {
      support.pop_back();
      chosen[static_cast<std::size_t>(best)] = false;
      sol.termination = Termination::Stalled;
      return sol;
    }
    sol.delta.setZero();
    for (std::size_t k = 0; k < support.size(); ++k) {
      sol.delta[support[k]] = fit.solution[static_cast<Eigen::Index>(k)];
    }
    r = y - g.atoms() * sol.delta;
    sol.residual_norm = r.norm();
    ++sol.iterations;
  }

  sol.support_d = support;
  sol.termination = sol.residual_norm <= stop.residual_tol
                        ? Termination::Residual
                        : Termination::MaxIters;
  return sol;
}

SparseSolution nn_omp_solve(const Dictionary& x, const Vector& y,
                            const StoppingCriteria& stop) {
  require_finite(y, "nn_omp_solve: y");
  if (x.rows() != y.size()) throw std::invalid_argument("nn_omp_solve: size mismatch");
  const int max_iters = resolve_max_iters(stop, x.rows());
  const double nn_tol = std::max(1e-10 * (x.atoms().transpose() * y)
                                     .lpNorm<Eigen::Infinity>(),
                                 1e-14);

  SparseSolution sol;
  sol.delta = Vector::Zero(x.size());
  Vector r = y;
  sol.residual_norm = r.norm();
  std::vector<bool> chosen(static_cast<std::size_t>(x.size()), false);
  std::vector<int> support;

  while (sol.residual_norm > stop.residual_tol && sol.iterations < max_iters &&
         static_cast<Eigen::Index>(support.size()) < x.size()) {
    const Vector corr = x.atoms().transpose() * r;
    int best = -1;
    double best_val = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (chosen[static_cast<std::size_t>(i)]) continue;
      if (corr[i] > best_val) {
        best = static_cast<int>(i);
        best_val = corr[i];
      }
    }
    if (best < 0) {
      sol.termination = Termination::Stalled;
      return sol;
    }
    support.push_back(best);
    chosen[static_cast<std::size_t>(best)] = true;

    LeastSquaresResult fit;
    try {
      fit = nnls_solve(gather(x.atoms(), support), y, nn_tol);
    } catch (const iteration_limit_error& e) {
      fit = e.best_iterate;
    }
    sol.delta.setZero();
    for (std::size_t k = 0; k < support.size(); ++k) {
      sol.delta[support[k]] = fit.solution[static_cast<Eigen::Index>(k)];
    }
    r = y - x.atoms() * sol.delta;
    sol.residual_norm = r.norm();
    ++sol.iterations;
  }

  sol.support_x = support;
  sol.termination = sol.residual_norm <= stop.residual_tol
                        ? Termination::Residual
                        : Termination::MaxIters;
  return sol;
}

SparseSolution comb_omp_solve(const CombinedDictionary& g, const Vector& y,
                              const StoppingCriteria& stop,
                              const CombOmpOptions& opts) {
  require_finite(y, "comb_omp_solve: y");
  if (g.g.rows() != y.size()) {
    throw std::invalid_argument("comb_omp_solve: size mismatch");
  }
  const Matrix& atoms = g.g.atoms();
  const auto kx = g.kx();
  const auto kg = g.kg();
  const int max_iters = resolve_max_iters(stop, g.g.rows());

  SparseSolution sol;
  sol.delta = Vector::Zero(kg);
  Vector r = y;
  sol.residual_norm = r.norm();
  std::vector<bool> chosen(static_cast<std::size_t>(kg), false);
  // Combined support in selection order; X/D membership by index < kx.
  std::vector<int> support;

  // Refit on the current support; X-block rows first so the sign constraint
  // indexes the leading block.
  auto refit = [&](bool constrained, bool require_full) -> bool {
    std::vector<int> ordered;
    ordered.reserve(support.size());
    for (int i : support) {
      if (i < kx) ordered.push_back(i);
    }
    const auto nonneg = static_cast<Eigen::Index>(ordered.size());
    for (int i : support) {
      if (i >= kx) ordered.push_back(i);
    }
    Matrix sub = gather(atoms, ordered);
    LeastSquaresResult fit;
    try {
      if (constrained) {
        fit = lsi_solve(sub, y, nonneg);
      } else {
        fit = solve_ls(sub, y);
        if (fit.rank_deficient && require_full) return false;
      }
    } catch (const std::exception&) {
      return false;
    }
    sol.delta.setZero();
    for (std::size_t k = 0; k < ordered.size(); ++k) {
      sol.delta[ordered[k]] = fit.solution[static_cast<Eigen::Index>(k)];
    }
    r = y - atoms * sol.delta;
    sol.residual_norm = r.norm();
    return true;
  };

  bool stalled = false;
  while (sol.residual_norm > stop.residual_tol && sol.iterations < max_iters &&
         static_cast<Eigen::Index>(support.size()) < kg) {
    const Vector corr = atoms.transpose() * r;

    int best_x = -1;
    double best_x_val = 0.0;  // [pi]+ candidate, must be strictly positive
    for (Eigen::Index i = 0; i < kx; ++i) {
      if (chosen[static_cast<std::size_t>(i)]) continue;
      if (corr[i] > best_x_val) {
        best_x = static_cast<int>(i);
        best_x_val = corr[i];
      }
    }
    int best_d = -1;
    double best_d_val = 0.0;
    for (Eigen::Index i = kx; i < kg; ++i) {
      if (chosen[static_cast<std::size_t>(i)]) continue;
      const double v = std::abs(corr[i]);
      if (v > best_d_val) {
        best_d = static_cast<int>(i);
        best_d_val = v;
      }
    }
    // X wins exact ties between the block champions.
    int pick = -1;
    if (best_x >= 0 && best_x_val >= best_d_val) {
      pick = best_x;
    } else if (best_d >= 0) {
      pick = best_d;
    }
    if (pick < 0) {
      stalled = true;
      break;
    }

    support.push_back(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    if (!refit(opts.constrained_update, true)) {
      support.pop_back();
      chosen[static_cast<std::size_t>(pick)] = false;
      if (support.empty()) {
        sol.delta.setZero();
        r = y;
        sol.residual_norm = r.norm();
      } else {
        refit(opts.constrained_update, false);
      }
      stalled = true;
      break;
    }
    ++sol.iterations;
  }

  if (opts.debias && !support.empty()) {
    refit(true, false);
  }
  for (int i : support) {
    (i < kx ? sol.support_x : sol.support_d).push_back(i);
  }
  sol.termination = stalled ? Termination::Stalled
                    : sol.residual_norm <= stop.residual_tol
                        ? Termination::Residual
                        : Termination::MaxIters;
  return sol;
}

}  // namespace combrec
