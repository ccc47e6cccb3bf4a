#include "combrec/convex.hpp"

#include <cmath>
#include <limits>

namespace combrec {

namespace {

constexpr double kEventEps = 1e-12;

// Incrementally maintained Cholesky factor of the active Gram matrix.
class ActiveGram {
 public:
  explicit ActiveGram(const Matrix& atoms) : atoms_(atoms) {}

  const std::vector<int>& indices() const { return idx_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(idx_.size()); }

  // Appends one atom; fails (returns false) when it is numerically dependent
  // on the active ones.
  bool append(int j) {
    const auto s = size();
    Vector cross(s);
    for (Eigen::Index k = 0; k < s; ++k) {
      cross[k] = atoms_.col(idx_[static_cast<std::size_t>(k)]).dot(atoms_.col(j));
    }
    Vector l = l_.topLeftCorner(s, s).triangularView<Eigen::Lower>().solve(cross);
    const double d2 = atoms_.col(j).squaredNorm() - l.squaredNorm();
    if (d2 <= 1e-12) return false;
    if (l_.rows() <= s) {
      Matrix grown = Matrix::Zero(2 * s + 4, 2 * s + 4);
      grown.topLeftCorner(s, s) = l_.topLeftCorner(s, s);
      l_ = std::move(grown);
    }
    l_.block(s, 0, 1, s) = l.transpose();
    l_(s, s) = std::sqrt(d2);
    idx_.push_back(j);
    return true;
  }

  // Removes the atom at position `pos` and refactors.
  void remove(std::size_t pos) {
    idx_.erase(idx_.begin() + static_cast<std::ptrdiff_t>(pos));
    const auto s = size();
    Matrix gram(s, s);
    for (Eigen::Index a = 0; a < s; ++a) {
      for (Eigen::Index b = 0; b <= a; ++b) {
        gram(a, b) = atoms_.col(idx_[static_cast<std::size_t>(a)])
                         .dot(atoms_.col(idx_[static_cast<std::size_t>(b)]));
        gram(b, a) = gram(a, b);
      }
    }
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("homotopy: active Gram lost positive definiteness");
    }
    l_ = Matrix::Zero(s, s);
    l_.topLeftCorner(s, s) = llt.matrixL();
  }

  // Solves Gram * out = rhs through the factor.
  Vector solve(const Vector& rhs) const {
    const auto s = size();
    const Matrix l = l_.topLeftCorner(s, s);
    Vector t = l.triangularView<Eigen::Lower>().solve(rhs);
    return l.transpose().triangularView<Eigen::Upper>().solve(t);
  }

 private:
  const Matrix& atoms_;
  std::vector<int> idx_;
  Matrix l_ = Matrix::Zero(0, 0);
};

}  // namespace

SparseSolution nn_homotopy_solve(const Dictionary& a, const Vector& y,
                                 const PathSolverConfig& cfg) {
  require_finite(y, "nn_homotopy_solve: y");
  if (a.rows() != y.size()) {
    throw std::invalid_argument("nn_homotopy_solve: size mismatch");
  }
  if (!(cfg.residual_tol >= 0.0)) {
    throw std::invalid_argument("nn_homotopy_solve: residual_tol must be >= 0");
  }
  const Matrix& atoms = a.atoms();
  const auto k = a.size();
  const int cap = cfg.max_breakpoints > 0
                      ? cfg.max_breakpoints
                      : 4 * static_cast<int>(std::min(a.rows(), k));

  SparseSolution sol;
  sol.delta = Vector::Zero(k);

  Vector r = y;
  double res = r.norm();
  if (res <= cfg.residual_tol) {
    sol.residual_norm = res;
    return sol;
  }

  Vector corr = atoms.transpose() * y;
  double lambda = corr.maxCoeff();
  if (lambda <= kEventEps) {
    // Nothing has positive correlation: the zero vector is already the
    // non-negative least squares optimum.
    sol.residual_norm = res;
    sol.termination = Termination::Stalled;
    return sol;
  }

  ActiveGram active(atoms);
  std::vector<bool> in_active(static_cast<std::size_t>(k), false);
  std::vector<bool> banned(static_cast<std::size_t>(k), false);
  {
    int first = 0;
    for (Eigen::Index i = 1; i < k; ++i) {
      if (corr[i] > corr[first]) first = static_cast<int>(i);
    }
    active.append(first);
    in_active[static_cast<std::size_t>(first)] = true;
  }

  auto finish = [&](Termination t) {
    // Ties at segment ends can leave machine-precision negatives behind.
    for (Eigen::Index i = 0; i < k; ++i) {
      if (sol.delta[i] < 0.0 && sol.delta[i] > -1e-12) sol.delta[i] = 0.0;
    }
    sol.residual_norm = res;
    sol.termination = t;
    for (int i : active.indices()) {
      sol.support_x.push_back(i);
    }
    return sol;
  };

  while (true) {
    if (sol.iterations >= cap) {
      throw path_limit_error("nn_homotopy_solve: breakpoint cap exceeded",
                             finish(Termination::MaxIters));
    }
    ++sol.iterations;

    const auto s = active.size();
    const Vector u = active.solve(Vector::Ones(s));
    Vector dir = Vector::Zero(y.size());
    for (Eigen::Index p = 0; p < s; ++p) {
      dir += u[p] * atoms.col(active.indices()[static_cast<std::size_t>(p)]);
    }
    const Vector v = atoms.transpose() * dir;

    // Earliest event as lambda decreases by step: a passive atom's
    // correlation catches the shrinking boundary, or an active coefficient
    // hits zero. Ties resolve to the lowest atom index.
    double step_event = std::numeric_limits<double>::infinity();
    int join = -1;
    int drop_pos = -1;
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      if (in_active[uj] || banned[uj]) continue;
      const double denom = 1.0 - v[j];
      if (denom <= kEventEps) continue;
      double step = (lambda - corr[j]) / denom;
      if (step < 0.0) step = 0.0;
      if (step < step_event - kEventEps) {
        step_event = step;
        join = static_cast<int>(j);
        drop_pos = -1;
      }
    }
    for (Eigen::Index p = 0; p < s; ++p) {
      if (u[p] >= 0.0) continue;
      const int atom = active.indices()[static_cast<std::size_t>(p)];
      const double coef = sol.delta[atom];
      double step = -coef / u[p];
      if (step < 0.0) step = 0.0;
      const bool wins =
          step < step_event - kEventEps ||
          (step < step_event + kEventEps &&
           (join < 0 || atom < join) &&
           (drop_pos < 0 || atom < active.indices()[static_cast<std::size_t>(drop_pos)]));
      if (wins) {
        step_event = step;
        drop_pos = static_cast<int>(p);
        join = -1;
      }
    }

    // Advance to the event (or to lambda = 0 when nothing intervenes) and
    // stop there if the residual target is met: running segments to their
    // breakpoints avoids any shrinkage bias at exit.
    const double step = std::min(step_event, lambda);
    for (Eigen::Index p = 0; p < s; ++p) {
      sol.delta[active.indices()[static_cast<std::size_t>(p)]] += step * u[p];
    }
    lambda -= step;

    const bool at_event = step == step_event;
    if (at_event && drop_pos >= 0) {
      const int atom = active.indices()[static_cast<std::size_t>(drop_pos)];
      sol.delta[atom] = 0.0;
      in_active[static_cast<std::size_t>(atom)] = false;
      active.remove(static_cast<std::size_t>(drop_pos));
      std::fill(banned.begin(), banned.end(), false);
    }

    r = y - atoms * sol.delta;
    res = r.norm();
    // The joining atom is only admitted if the path has to continue, so a
    // run that terminates here reports the support that actually carries
    // the solution.
    if (res <= cfg.residual_tol) return finish(Termination::Residual);
    if (at_event && join >= 0) {
      if (active.append(join)) {
        in_active[static_cast<std::size_t>(join)] = true;
      } else {
        banned[static_cast<std::size_t>(join)] = true;
      }
    }
    if (active.size() == 0) return finish(Termination::Stalled);

    corr = atoms.transpose() * r;
    // Keep lambda pinned to the realized correlation level to absorb drift.
    double level = 0.0;
    for (int i : active.indices()) level = std::max(level, corr[i]);
    lambda = std::min(lambda, level);
    if (lambda <= kEventEps) {
      // At the end of the path; the current point is the NNLS optimum.
      return finish(res <= cfg.residual_tol ? Termination::Residual
                                            : Termination::Stalled);
    }
  }
}

namespace {

// Collapses an augmented-path solution back onto original indices.
void fold_support(const SparseSolution& aug, Eigen::Index kx, Eigen::Index kd,
                  SparseSolution& out) {
  std::vector<bool> seen_x(static_cast<std::size_t>(kx), false);
  std::vector<bool> seen_d(static_cast<std::size_t>(kd), false);
  for (int idx : aug.support_x) {
    if (idx < kx) {
      if (!seen_x[static_cast<std::size_t>(idx)]) {
        seen_x[static_cast<std::size_t>(idx)] = true;
        out.support_x.push_back(idx);
      }
    } else {
      const auto d = (idx - kx) % kd;
      if (!seen_d[static_cast<std::size_t>(d)]) {
        seen_d[static_cast<std::size_t>(d)] = true;
        out.support_d.push_back(static_cast<int>(kx + d));
      }
    }
  }
}

}  // namespace

SparseSolution bp_solve(const Dictionary& g, const Vector& y,
                        const PathSolverConfig& cfg) {
  const auto k = g.size();
  Matrix aug(g.rows(), 2 * k);
  aug.leftCols(k) = g.atoms();
  aug.rightCols(k) = -g.atoms();

  const SparseSolution nn =
      nn_homotopy_solve(Dictionary::from_columns(std::move(aug)), y, cfg);

  SparseSolution sol;
  sol.delta = nn.delta.head(k) - nn.delta.tail(k);
  sol.residual_norm = nn.residual_norm;
  sol.iterations = nn.iterations;
  sol.termination = nn.termination;
  fold_support(nn, 0, k, sol);
  return sol;
}

SparseSolution comb_bp_solve(const CombinedDictionary& g, const Vector& y,
                             const PathSolverConfig& cfg) {
  const auto kx = g.kx();
  const auto kd = g.kd();
  if (kd == 0) {
    SparseSolution sol = nn_homotopy_solve(g.g, y, cfg);
    return sol;
  }
  if (kx == 0) return bp_solve(g.g, y, cfg);

  Matrix aug(g.g.rows(), kx + 2 * kd);
  aug.leftCols(kx) = g.x_block();
  aug.middleCols(kx, kd) = g.d_block();
  aug.rightCols(kd) = -g.d_block();

  const SparseSolution nn =
      nn_homotopy_solve(Dictionary::from_columns(std::move(aug)), y, cfg);

  SparseSolution sol;
  sol.delta = Vector(kx + kd);
  sol.delta.head(kx) = nn.delta.head(kx);
  sol.delta.tail(kd) = nn.delta.segment(kx, kd) - nn.delta.tail(kd);
  sol.residual_norm = nn.residual_norm;
  sol.iterations = nn.iterations;
  sol.termination = nn.termination;
  fold_support(nn, kx, kd, sol);
  return sol;
}

KktReport verify_kkt(const CombinedDictionary& g, const Vector& y,
                     const Vector& delta, double tol) {
  if (delta.size() != g.kg() || y.size() != g.g.rows()) {
    throw std::invalid_argument("verify_kkt: size mismatch");
  }
  const auto kx = g.kx();
  const Vector r = y - g.g.atoms() * delta;
  const Vector corr = g.g.atoms().transpose() * r;

  double level = 0.0;
  for (Eigen::Index i = 0; i < g.kg(); ++i) {
    level = std::max(level, i < kx ? corr[i] : std::abs(corr[i]));
  }

  double violation = 0.0;
  for (Eigen::Index i = 0; i < kx; ++i) {
    violation = std::max(violation, -delta[i]);  // feasibility of the X block
    if (delta[i] > tol) {
      violation = std::max(violation, std::abs(corr[i] - level));
    }
  }
  for (Eigen::Index i = kx; i < g.kg(); ++i) {
    if (std::abs(delta[i]) > tol) {
      const double aligned = delta[i] > 0.0 ? corr[i] : -corr[i];
      violation = std::max(violation, std::abs(aligned - level));
    }
  }
  return KktReport{violation <= tol, violation};
}

}  // namespace combrec
