#include "combrec/bounds.hpp"

#include <cmath>
#include <limits>

namespace combrec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_plus(double v) { return v > 0.0 ? v : 0.0; }

void check_mu(double mu, const char* name) {
  if (!(mu >= 0.0) || mu > 1.0) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

ThresholdReport strict_report(ThresholdAlgorithm alg, double raw,
                              const CoherenceProfile& prof) {
  ThresholdReport r;
  r.algorithm = alg;
  r.inputs = prof;
  r.raw_bound = raw;
  if (std::isinf(raw)) {
    r.unbounded = true;
    r.max_sg = std::numeric_limits<long>::max();
  } else {
    r.max_sg = strict_integer_below(raw);
  }
  return r;
}

}  // namespace

std::string to_string(ThresholdAlgorithm a) {
  switch (a) {
    case ThresholdAlgorithm::NnUnique: return "NN_UNIQUE";
    case ThresholdAlgorithm::FullRankPair: return "FULL_RANK_PAIR";
    case ThresholdAlgorithm::ReducedNn: return "REDUCED_NN";
    case ThresholdAlgorithm::CombBp: return "COMB_BP";
    case ThresholdAlgorithm::CombOmp: return "COMB_OMP";
  }
  return "?";
}

long strict_integer_below(double raw_bound) {
  const long v = static_cast<long>(std::ceil(raw_bound)) - 1;
  return v < 0 ? 0 : v;
}

ThresholdReport threshold_nonneg(double mu_x) {
  check_mu(mu_x, "mu_x");
  CoherenceProfile prof;
  prof.mu_x = mu_x;
  prof.sigma_x = mu_x;
  prof.mu_m = mu_x;
  const double raw = mu_x == 0.0 ? kInf : 0.5 * (1.0 + 1.0 / mu_x);
  return strict_report(ThresholdAlgorithm::NnUnique, raw, prof);
}

bool full_rank_condition(long sx, long sd, const CoherenceProfile& prof) {
  if (sx < 0 || sd < 0) throw std::invalid_argument("full_rank_condition: negative sparsity");
  const double bx = clamp_plus(1.0 - prof.mu_x * (static_cast<double>(sx) - 1.0));
  const double bd = clamp_plus(1.0 - prof.mu_d * (static_cast<double>(sd) - 1.0));
  if (prof.mu_g == 0.0) return bx > 0.0 && bd > 0.0;
  return static_cast<double>(sx) * static_cast<double>(sd) * prof.mu_g * prof.mu_g <
         bx * bd;
}

double coherence_bound_reduced(long sd, const CoherenceProfile& prof) {
  if (sd < 0) throw std::invalid_argument("coherence_bound_reduced: negative Sd");
  if (prof.mu_d > 0.0 &&
      !(static_cast<double>(sd) < 1.0 + 1.0 / prof.mu_d)) {
    throw std::invalid_argument(
        "coherence_bound_reduced: requires Sd < 1 + 1/mu_d");
  }
  const double bd = clamp_plus(1.0 - prof.mu_d * (static_cast<double>(sd) - 1.0));
  const double num = 0.5 * bd * (1.0 + prof.mu_x);
  const double den = prof.mu_x * bd + static_cast<double>(sd) * prof.mu_g * prof.mu_g;
  if (den == 0.0) return kInf;
  return num / den;
}

ThresholdReport threshold_reduced_nn(long sd, const CoherenceProfile& prof) {
  // coherence_bound_reduced is already in threshold form (see bounds.hpp).
  ThresholdReport r = strict_report(ThresholdAlgorithm::ReducedNn,
                                    coherence_bound_reduced(sd, prof), prof);
  r.sd = sd;
  return r;
}

bool comb_bp_condition(long sx, long sd, const CoherenceProfile& prof) {
  if (sx < 0 || sd < 0) throw std::invalid_argument("comb_bp_condition: negative sparsity");
  const double sxd = static_cast<double>(sx);
  const double sdd = static_cast<double>(sd);
  const double mud = prof.mu_d;
  const double mug = prof.mu_g;
  const double lhs = (1.0 + mud) * (2.0 * sxd * mud + sdd * (mug + mud)) +
                     2.0 * sxd * sdd * (mug * mug - mud * mud);
  return lhs < (1.0 + mud) * (1.0 + mud);
}

namespace {

template <typename Cond>
ThresholdReport split_search(ThresholdAlgorithm alg, const CoherenceProfile& prof,
                             long s_max, Cond cond) {
  if (s_max < 1) throw std::invalid_argument("split search: s_max must be >= 1");
  long best = 0;
  for (long s = 1; s <= s_max; ++s) {
    bool ok = true;
    for (long sx = 0; sx <= s && ok; ++sx) {
      ok = cond(sx, s - sx, prof);
    }
    if (!ok) break;
    best = s;
  }
  ThresholdReport r;
  r.algorithm = alg;
  r.inputs = prof;
  r.max_sg = best;
  r.raw_bound = static_cast<double>(best + 1);  // first failing total, if any
  r.unbounded = best == s_max;
  if (r.unbounded) r.raw_bound = kInf;
  return r;
}

}  // namespace

ThresholdReport threshold_comb_bp(const CoherenceProfile& prof, long s_max) {
  ThresholdReport r = split_search(ThresholdAlgorithm::CombBp, prof, s_max,
                                   comb_bp_condition);
  // Hitting the cap means the search was truncated, not that the bound is
  // infinite, unless every coherence is zero.
  if (r.unbounded && (prof.mu_d > 0.0 || prof.mu_g > 0.0)) {
    r.unbounded = false;
    r.raw_bound = static_cast<double>(r.max_sg + 1);
  }
  return r;
}

ThresholdReport threshold_full_rank(const CoherenceProfile& prof, long s_max) {
  ThresholdReport r = split_search(ThresholdAlgorithm::FullRankPair, prof, s_max,
                                   full_rank_condition);
  if (r.unbounded &&
      (prof.mu_x > 0.0 || prof.mu_d > 0.0 || prof.mu_g > 0.0)) {
    r.unbounded = false;
    r.raw_bound = static_cast<double>(r.max_sg + 1);
  }
  return r;
}

ThresholdReport threshold_comb_omp(const CoherenceProfile& prof) {
  const double mu_m = std::max({prof.mu_x, prof.mu_d, prof.mu_g});
  CoherenceProfile p = prof;
  p.mu_m = mu_m;
  const double raw = mu_m == 0.0 ? kInf : 0.5 * (1.0 + 1.0 / mu_m);
  return strict_report(ThresholdAlgorithm::CombOmp, raw, p);
}

bool comb_omp_first_step_condition(long sx, long sd, const CoherenceProfile& prof) {
  if (sx < 1) throw std::invalid_argument("comb_omp_first_step_condition: Sx >= 1");
  if (sd < 0) throw std::invalid_argument("comb_omp_first_step_condition: negative Sd");
  return (static_cast<double>(sx) - 1.0) * prof.mu_d +
             static_cast<double>(sd) * prof.mu_g <
         0.5;
}

bool comb_omp_full_condition(long sx, long sd, const CoherenceProfile& prof) {
  if (sx < 0 || sd < 0) throw std::invalid_argument("comb_omp_full_condition: negative sparsity");
  const double t = static_cast<double>(sx) * prof.mu_d +
                   static_cast<double>(sd) * prof.mu_g;
  const double den = 1.0 - (t - prof.mu_d);
  if (den <= 0.0) return false;
  return t / den < 1.0;
}

}  // namespace combrec
