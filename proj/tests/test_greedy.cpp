#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <combrec/bench.hpp>
#include <combrec/bounds.hpp>
#include <combrec/greedy.hpp>
#include <combrec/oracle.hpp>
#include <combrec/rng.hpp>

using combrec::Algorithm;
using combrec::CombOmpOptions;
using combrec::Matrix;
using combrec::Rng;
using combrec::StoppingCriteria;
using combrec::Termination;
using combrec::TrialSpec;
using combrec::Vector;

TEST_CASE("omp recovers a single atom in one iteration") {
  auto g = combrec::gaussian_dictionary(8, 12, 5);
  Vector y = g.atom(7);
  auto sol = combrec::omp_solve(g, y, {});
  REQUIRE(sol.support_d.size() == 1);
  CHECK(sol.support_d[0] == 7);
  CHECK(sol.delta[7] == doctest::Approx(1.0));
  CHECK(sol.iterations == 1);
  CHECK(sol.residual_norm < 1e-10);
  CHECK(sol.termination == Termination::Residual);
}

TEST_CASE("omp on the zero signal does nothing") {
  auto g = combrec::gaussian_dictionary(6, 9, 6);
  auto sol = combrec::omp_solve(g, Vector::Zero(6), {});
  CHECK(sol.iterations == 0);
  CHECK(sol.support_d.empty());
  CHECK(sol.termination == Termination::Residual);
}

TEST_CASE("omp matches the exhaustive search when the recovery condition holds") {
  int eligible = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto g = combrec::gaussian_dictionary(8, 12, 300 + seed);
    Rng rng(400 + seed);
    auto support = rng.sample_without_replacement(12, 2);
    Vector delta = Vector::Zero(12);
    for (int i : support) delta[i] = rng.uniform(-1.0, 1.0) + (rng.uniform01() < 0.5 ? -0.2 : 0.2);
    Vector y = g.atoms() * delta;

    // Exact-recovery condition on the planted support.
    Matrix g1(8, 2);
    g1.col(0) = g.atom(support[0]);
    g1.col(1) = g.atom(support[1]);
    Matrix pinv = combrec::pseudoinverse(g1);
    double worst = 0.0;
    for (int i = 0; i < 12; ++i) {
      if (i == support[0] || i == support[1]) continue;
      worst = std::max(worst, (pinv * g.atom(i)).lpNorm<1>());
    }
    if (worst >= 1.0) continue;
    ++eligible;

    auto sol = combrec::omp_solve(g, y, {});
    auto oracle = combrec::ml0_search(
        combrec::CombinedDictionary{g, 0}, y, 2, 1e-8);
    std::vector<int> got = sol.support_d;
    std::sort(got.begin(), got.end());
    std::vector<int> want = oracle.solution.support_d;
    std::sort(want.begin(), want.end());
    CHECK(got == want);
  }
  CHECK(eligible > 10);
}

TEST_CASE("nn-omp basics") {
  auto x = combrec::gaussian_dictionary(7, 10, 9);
  Vector y = 3.0 * x.atom(2);
  auto sol = combrec::nn_omp_solve(x, y, {});
  REQUIRE(sol.support_x.size() == 1);
  CHECK(sol.support_x[0] == 2);
  CHECK(sol.delta[2] == doctest::Approx(3.0));

  // Anti-correlated signal on an identity dictionary stalls.
  auto eye = combrec::Dictionary::from_columns(Matrix::Identity(4, 4));
  Vector neg = -eye.atom(1);
  auto stall = combrec::nn_omp_solve(eye, neg, {});
  CHECK(stall.termination == Termination::Stalled);
  CHECK(stall.support_x.empty());
}

TEST_CASE("nn-omp exact recovery below the non-negative threshold") {
  int ran = 0;
  for (std::uint64_t seed = 0; seed < 200 && ran < 200; ++seed) {
    auto x = combrec::gaussian_dictionary(40, 60, 900 + seed);
    const double mu = combrec::coherence(x);
    const long smax = combrec::threshold_nonneg(mu).max_sg;
    if (smax < 1) continue;
    const int s = static_cast<int>(std::min<long>(smax, 3));
    Rng rng(1700 + seed);
    auto support = rng.sample_without_replacement(60, s);
    Vector alpha = Vector::Zero(60);
    for (int i : support) alpha[i] = 0.1 + rng.uniform01();
    Vector y = x.atoms() * alpha;
    auto sol = combrec::nn_omp_solve(x, y, {});
    CHECK(combrec::rre(sol.delta, alpha) < 1e-6);
    ++ran;
  }
  CHECK(ran >= 100);
}

TEST_CASE("comb-omp splits an orthogonal pair correctly") {
  // Orthogonal blocks: X = first 3 identity columns, D = last 3.
  Matrix x = Matrix::Identity(6, 6).leftCols(3);
  Matrix d = Matrix::Identity(6, 6).rightCols(3);
  auto g = combrec::make_combined(x, d);
  Vector y = Vector::Zero(6);
  y[2] = 1.0;   // x atom 2
  y[5] = 2.0;   // d atom 2 (global index 5)
  auto sol = combrec::comb_omp_solve(g, y, {});
  REQUIRE(sol.support_x.size() == 1);
  REQUIRE(sol.support_d.size() == 1);
  CHECK(sol.support_x[0] == 2);
  CHECK(sol.support_d[0] == 5);
  CHECK(sol.delta[2] == doctest::Approx(1.0));
  CHECK(sol.delta[5] == doctest::Approx(2.0));
  CHECK(sol.residual_norm < 1e-12);
}

TEST_CASE("comb-omp stalls with no positive X correlation and no D block") {
  auto x = combrec::negated_identity_dictionary(4);
  combrec::CombinedDictionary g{x, 4};  // Kd = 0
  Vector y = x.atom(2) * -1.0;          // equals +e2, anti-correlated with -I
  auto sol = combrec::comb_omp_solve(g, y, {});
  CHECK(sol.termination == Termination::Stalled);
  CHECK(sol.support_x.empty());
  CHECK(sol.support_d.empty());
}

TEST_CASE("comb-omp with empty X block reproduces omp exactly") {
  auto d = combrec::gaussian_dictionary(10, 20, 77);
  combrec::CombinedDictionary g{d, 0};
  Rng rng(78);
  for (int t = 0; t < 20; ++t) {
    Vector y(10);
    for (int i = 0; i < 10; ++i) y[i] = rng.normal();
    auto a = combrec::omp_solve(d, y, {});
    auto b = combrec::comb_omp_solve(g, y, {});
    CHECK(a.support_d == b.support_d);  // same selections in the same order
    CHECK((a.delta - b.delta).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(a.residual_norm == b.residual_norm);
  }
}

TEST_CASE("comb-omp with empty D block matches nn-omp support sequence") {
  auto x = combrec::gaussian_dictionary(12, 18, 81);
  combrec::CombinedDictionary g{x, 18};
  Rng rng(82);
  CombOmpOptions constrained;
  constrained.constrained_update = true;
  for (int t = 0; t < 20; ++t) {
    Vector alpha = Vector::Zero(18);
    auto support = rng.sample_without_replacement(18, 3);
    for (int i : support) alpha[i] = rng.uniform01() + 0.05;
    Vector y = x.atoms() * alpha;
    auto a = combrec::nn_omp_solve(x, y, {});
    auto b = combrec::comb_omp_solve(g, y, {}, constrained);
    CHECK(a.support_x == b.support_x);
  }
}

TEST_CASE("comb-omp supports grow strictly and residuals never increase") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TrialSpec spec;
    spec.m = 24;
    spec.kx = 20;
    spec.kd = 20;
    spec.sx = 6;
    spec.sd = 6;
    spec.seed = 5000 + seed;
    auto inst = combrec::plant_instance(spec);

    // Replay the solver one iteration at a time via max_iters.
    double prev_res = inst.y.norm();
    std::size_t prev_size = 0;
    for (int t = 1; t <= 12; ++t) {
      auto sol = combrec::comb_omp_solve(inst.g, inst.y, {t, 1e-6});
      const std::size_t size = sol.support_x.size() + sol.support_d.size();
      CHECK(size <= static_cast<std::size_t>(t));
      CHECK(size >= prev_size);
      std::vector<int> all = sol.support_x;
      all.insert(all.end(), sol.support_d.begin(), sol.support_d.end());
      std::sort(all.begin(), all.end());
      CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());  // no duplicates
      CHECK(sol.residual_norm <= prev_res + 1e-12);
      prev_res = sol.residual_norm;
      prev_size = size;
      // Unconstrained update keeps the residual orthogonal to the support.
      Vector r = inst.y - inst.g.g.atoms() * sol.delta;
      for (int i : all) {
        CHECK(std::abs(inst.g.g.atoms().col(i).dot(r)) < 1e-9);
      }
      if (sol.termination == Termination::Residual) break;
    }
  }
}

TEST_CASE("comb-omp constrained update satisfies the sign constraint per iteration") {
  CombOmpOptions opts;
  opts.constrained_update = true;
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    TrialSpec spec;
    spec.m = 20;
    spec.kx = 15;
    spec.kd = 15;
    spec.sx = 4;
    spec.sd = 4;
    spec.seed = 6000 + seed;
    auto inst = combrec::plant_instance(spec);
    for (int t = 1; t <= 10; ++t) {
      auto sol = combrec::comb_omp_solve(inst.g, inst.y, {t, 1e-6}, opts);
      for (Eigen::Index i = 0; i < inst.g.kx(); ++i) {
        CHECK(sol.delta[i] >= -1e-12);
      }
      if (sol.termination == Termination::Residual) break;
    }
  }
}

TEST_CASE("comb-omp debias refits on the final support") {
  CombOmpOptions opts;
  opts.debias = true;
  TrialSpec spec;
  spec.m = 16;
  spec.kx = 12;
  spec.kd = 12;
  spec.sx = 3;
  spec.sd = 3;
  spec.seed = 7500;
  auto inst = combrec::plant_instance(spec);
  auto sol = combrec::comb_omp_solve(inst.g, inst.y, {}, opts);
  for (Eigen::Index i = 0; i < inst.g.kx(); ++i) {
    CHECK(sol.delta[i] >= -1e-12);
  }
  CHECK(combrec::rre(sol.delta, inst.delta_true) < 1e-6);
}

TEST_CASE("comb-omp recovers exactly inside the guarantee regime (small)") {
  // Desk-scale version; the acceptance suite runs the full 500-trial sweep.
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    TrialSpec spec;
    spec.m = 50;
    spec.kx = 50;
    spec.kd = 50;
    spec.seed = 8000 + seed;
    spec.sx = 1;
    spec.sd = 0;
    auto probe = combrec::plant_instance(spec);
    auto prof = combrec::coherence_profile(probe.g);
    const long smax = combrec::threshold_comb_omp(prof).max_sg;
    REQUIRE(smax >= 1);
    // Split the guaranteed sparsity across the blocks.
    spec.sx = static_cast<int>((smax + 1) / 2);
    spec.sd = static_cast<int>(smax - spec.sx);
    auto inst = combrec::plant_instance(spec);
    auto sol = combrec::comb_omp_solve(inst.g, inst.y, {});
    CHECK(combrec::rre(sol.delta, inst.delta_true) < 1e-6);
  }
}

TEST_CASE("first selection lands in the true support when the first-step condition holds") {
  // The condition needs low coherence, hence many measurements per atom.
  int eligible = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    TrialSpec spec;
    spec.m = 400;
    spec.kx = 32;
    spec.kd = 32;
    spec.sx = 2;
    spec.sd = 1;
    spec.seed = 9000 + seed;
    auto inst = combrec::plant_instance(spec);
    auto prof = combrec::coherence_profile(inst.g);
    if (!combrec::comb_omp_first_step_condition(spec.sx, spec.sd, prof)) continue;
    ++eligible;
    auto sol = combrec::comb_omp_solve(inst.g, inst.y, {1, 1e-6});
    std::vector<int> first = sol.support_x;
    first.insert(first.end(), sol.support_d.begin(), sol.support_d.end());
    REQUIRE(first.size() == 1);
    CHECK(inst.delta_true[first[0]] != 0.0);
  }
  CHECK(eligible > 100);
}
