#include "combrec/oracle.hpp"

#include <cmath>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "combrec/lp.hpp"

namespace combrec {

namespace {

double choose_guarded(Eigen::Index n, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) {
    c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (c > 1e16) return c;
  }
  return c;
}

// Colexicographic successor of a size-k index combination out of n.
bool next_combination(std::vector<int>& comb, Eigen::Index n) {
  const int k = static_cast<int>(comb.size());
  for (int i = 0; i < k; ++i) {
    const int limit = (i + 1 < k) ? comb[static_cast<std::size_t>(i + 1)] - 1
                                  : static_cast<int>(n) - 1;
    if (comb[static_cast<std::size_t>(i)] < limit) {
      ++comb[static_cast<std::size_t>(i)];
      for (int j = 0; j < i; ++j) comb[static_cast<std::size_t>(j)] = j;
      return true;
    }
  }
  return false;
}

std::vector<std::vector<int>> combinations_of_size(Eigen::Index n, int k) {
  std::vector<std::vector<int>> all;
  if (k == 0) {
    all.emplace_back();
    return all;
  }
  std::vector<int> comb(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
  do {
    all.push_back(comb);
  } while (next_combination(comb, n));
  return all;
}

// Sign-constrained fit of y on the listed columns (X block first); empty
// solution on rank deficiency or solver failure.
bool support_fit(const CombinedDictionary& g, const Vector& y,
                 const std::vector<int>& support, double tol, Vector& delta,
                 double& residual) {
  const auto kx = g.kx();
  std::vector<int> ordered;
  ordered.reserve(support.size());
  for (int i : support) {
    if (i < kx) ordered.push_back(i);
  }
  const auto nonneg = static_cast<Eigen::Index>(ordered.size());
  for (int i : support) {
    if (i >= kx) ordered.push_back(i);
  }
  Matrix sub(g.g.rows(), static_cast<Eigen::Index>(ordered.size()));
  for (std::size_t c = 0; c < ordered.size(); ++c) {
    sub.col(static_cast<Eigen::Index>(c)) = g.g.atoms().col(ordered[c]);
  }
  LeastSquaresResult fit;
  try {
    fit = lsi_solve(sub, y, nonneg, tol > 0.0 ? 1e-2 * tol : 0.0);
  } catch (const std::exception&) {
    return false;
  }
  delta = Vector::Zero(g.kg());
  for (std::size_t c = 0; c < ordered.size(); ++c) {
    delta[ordered[c]] = fit.solution[static_cast<Eigen::Index>(c)];
  }
  residual = fit.residual_norm;
  return true;
}

}  // namespace

Ml0Result ml0_search(const CombinedDictionary& g, const Vector& y, int s_max,
                     double tol, int threads) {
  require_finite(y, "ml0_search: y");
  if (s_max < 0 || s_max > g.kg()) {
    throw std::invalid_argument("ml0_search: s_max out of range");
  }
  double total = 0.0;
  for (int s = 0; s <= s_max; ++s) total += choose_guarded(g.kg(), s);
  if (total > 2e6) {
    throw std::invalid_argument("ml0_search: enumeration guard exceeded (" +
                                std::to_string(static_cast<long long>(total)) +
                                " supports)");
  }
  if (threads <= 0) {
#ifdef _OPENMP
    threads = omp_get_max_threads();
#else
    threads = 1;
#endif
  }

  Ml0Result out;
  out.solution.delta = Vector::Zero(g.kg());
  out.solution.residual_norm = y.norm();
  out.solution.termination = Termination::MaxIters;

  for (int s = 0; s <= s_max; ++s) {
    const auto combos = combinations_of_size(g.kg(), s);
    const auto count = static_cast<std::ptrdiff_t>(combos.size());
    std::vector<uint8_t> feasible(combos.size(), 0);
    std::vector<Vector> deltas(combos.size());

#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
      Vector delta;
      double residual = 0.0;
      if (support_fit(g, y, combos[static_cast<std::size_t>(idx)], tol, delta,
                      residual) &&
          residual <= tol) {
        feasible[static_cast<std::size_t>(idx)] = 1;
        deltas[static_cast<std::size_t>(idx)] = std::move(delta);
      }
    }

    // Deterministic merge: lowest colex rank wins; uniqueness compares the
    // remaining feasible solutions against it.
    std::ptrdiff_t first = -1;
    for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
      if (feasible[static_cast<std::size_t>(idx)]) {
        first = idx;
        break;
      }
    }
    if (first < 0) continue;

    const auto& support = combos[static_cast<std::size_t>(first)];
    out.solution.delta = deltas[static_cast<std::size_t>(first)];
    out.solution.residual_norm =
        (y - g.g.atoms() * out.solution.delta).norm();
    out.solution.iterations = s;
    out.solution.termination = Termination::Residual;
    for (int i : support) {
      (i < g.kx() ? out.solution.support_x : out.solution.support_d).push_back(i);
    }
    out.unique = true;
    for (std::ptrdiff_t idx = first + 1; idx < count && out.unique; ++idx) {
      if (feasible[static_cast<std::size_t>(idx)] &&
          (deltas[static_cast<std::size_t>(idx)] - out.solution.delta).norm() >
              1e-6) {
        out.unique = false;
      }
    }
    return out;
  }
  return out;
}

bool nn_singleton_check(const Dictionary& x, const Vector& y, int s_max,
                        double tol) {
  require_finite(y, "nn_singleton_check: y");
  if (s_max < 0 || s_max > x.size()) {
    throw std::invalid_argument("nn_singleton_check: s_max out of range");
  }
  double total = 0.0;
  for (int s = 0; s <= s_max; ++s) total += choose_guarded(x.size(), s);
  if (total > 2e6) {
    throw std::invalid_argument("nn_singleton_check: enumeration guard exceeded");
  }

  LeastSquaresResult base;
  try {
    base = nnls_solve(x.atoms(), y, std::max(1e-2 * tol, 1e-14));
  } catch (const iteration_limit_error& e) {
    base = e.best_iterate;
  }
  if (base.residual_norm > tol) return false;  // empty solution set

  // Without a strictly positive functional on the columns the solution set
  // contains a recession direction, hence is not a singleton.
  if (!is_m_plus(x, 1e-9).member) return false;

  for (int s = 0; s <= s_max; ++s) {
    std::vector<int> comb(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) comb[static_cast<std::size_t>(i)] = i;
    bool more = true;
    while (more) {
      Matrix sub(x.rows(), s);
      for (int c = 0; c < s; ++c) {
        sub.col(c) = x.atoms().col(comb[static_cast<std::size_t>(c)]);
      }
      LeastSquaresResult fit;
      bool ok = true;
      try {
        fit = nnls_solve(sub, y, std::max(1e-2 * tol, 1e-14));
      } catch (const iteration_limit_error&) {
        ok = false;
      }
      if (ok && fit.residual_norm <= tol) {
        Vector candidate = Vector::Zero(x.size());
        for (int c = 0; c < s; ++c) {
          candidate[comb[static_cast<std::size_t>(c)]] = fit.solution[c];
        }
        if ((candidate - base.solution).norm() > 1e-6) return false;
      }
      more = s > 0 && next_combination(comb, x.size());
      if (s == 0) more = false;
    }
  }
  return true;
}

FeasibilityCertificate lemma3_feasibility(const Dictionary& x, const Matrix& d1,
                                          double tol) {
  if (tol <= 0.0) tol = 1e-9;
  if (d1.cols() > 0 && d1.rows() != x.rows()) {
    throw std::invalid_argument("lemma3_feasibility: row mismatch");
  }
  if (d1.cols() > 0) {
    Eigen::ColPivHouseholderQR<Matrix> qr(d1);
    qr.setThreshold(rank_rtol(d1.rows(), d1.cols()));
    if (qr.rank() < d1.cols()) {
      throw std::invalid_argument("lemma3_feasibility: D1 rank deficient");
    }
  }
  FeasibilityCertificate cert;
  // Conic in h: solve at unit margin and rescale (the equalities are
  // invariant under scaling).
  auto h = lp_find_point(x.atoms(), Vector::Ones(x.size()), d1,
                         Vector::Zero(d1.cols()));
  if (h) {
    cert.feasible = true;
    cert.h = tol * std::move(*h);
  }
  return cert;
}

}  // namespace combrec
