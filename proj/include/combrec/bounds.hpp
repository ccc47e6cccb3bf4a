#pragma once

#include <string>

#include "combrec/dictgen.hpp"

namespace combrec {

enum class ThresholdAlgorithm { NnUnique, FullRankPair, ReducedNn, CombBp, CombOmp };

std::string to_string(ThresholdAlgorithm a);

// Deterministic sparsity threshold: recovery is guaranteed for every support
// and coefficient pattern with at most max_sg nonzeros. All bounds are
// strict, so max_sg is the largest integer strictly below raw_bound.
struct ThresholdReport {
  ThresholdAlgorithm algorithm = ThresholdAlgorithm::NnUnique;
  long max_sg = 0;
  double raw_bound = 0.0;  // +inf when unbounded
  bool unbounded = false;
  CoherenceProfile inputs;
  long sx = -1;  // set when the report is conditioned on a split
  long sd = -1;
};

// Largest integer strictly below the bound.
long strict_integer_below(double raw_bound);

// Uniqueness threshold for fully non-negative representations:
// sparsity < 0.5 (1 + 1/mu_x).
ThresholdReport threshold_nonneg(double mu_x);

// Full-column-rank test for a support pair:
// Sx Sd < [1 - mu_x (Sx-1)]+ [1 - mu_d (Sd-1)]+ / mu_g^2.
bool full_rank_condition(long sx, long sd, const CoherenceProfile& prof);

// Reduction bound for a known size-Sd general support:
//   0.5 [1 - mu_d (Sd-1)]+ (1 + mu_x) / (mu_x [1 - mu_d (Sd-1)]+ + Sd mu_g^2).
// Algebraically this equals 0.5 (1 + 1/m) with m = (mu_x + c) / (1 - c),
// c = Sd mu_g^2 / [1 - mu_d (Sd-1)]+, the worst-case coherence of the X
// block after projecting out the known support; it is therefore already the
// sparsity threshold for the reduced non-negative problem.
// Requires Sd < 1 + 1/mu_d.
double coherence_bound_reduced(long sd, const CoherenceProfile& prof);

// The above bound packaged as the Sx threshold report.
ThresholdReport threshold_reduced_nn(long sd, const CoherenceProfile& prof);

// Recovery condition for the sign-constrained basis pursuit on a split:
// (1+mu_d)(2 Sx mu_d + Sd (mu_g+mu_d)) + 2 Sx Sd (mu_g^2 - mu_d^2) < (1+mu_d)^2.
bool comb_bp_condition(long sx, long sd, const CoherenceProfile& prof);

// Largest total sparsity S <= s_max such that every split (Sx, Sd) of every
// S' <= S passes comb_bp_condition (exhaustive integer search).
ThresholdReport threshold_comb_bp(const CoherenceProfile& prof, long s_max);

// Same search against full_rank_condition.
ThresholdReport threshold_full_rank(const CoherenceProfile& prof, long s_max);

// Greedy-pursuit threshold: Sg < 0.5 (1 + 1/mu_m), mu_m = max(mu_x, mu_d, mu_g).
ThresholdReport threshold_comb_omp(const CoherenceProfile& prof);

// First-iteration selection guarantee: (Sx - 1) mu_d + Sd mu_g < 1/2.
bool comb_omp_first_step_condition(long sx, long sd, const CoherenceProfile& prof);

// Full greedy recovery condition:
// (Sx mu_d + Sd mu_g) / (1 - (Sx mu_d + Sd mu_g - mu_d)) < 1,
// false whenever the denominator is non-positive.
bool comb_omp_full_condition(long sx, long sd, const CoherenceProfile& prof);

}  // namespace combrec
