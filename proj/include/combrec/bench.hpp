#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "combrec/convex.hpp"
#include "combrec/greedy.hpp"

namespace combrec {

enum class Algorithm { Omp, NnOmp, CombOmp, Bp, NnBp, CombBp };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

enum class CoeffModel { Uniform, Signs };

std::string to_string(CoeffModel m);
CoeffModel coeff_model_from_string(const std::string& s);

struct TrialSpec {
  int m = 0;
  int kx = 0;
  int kd = 0;
  int sx = 0;
  int sd = 0;
  CoeffModel coeff_model = CoeffModel::Uniform;
  std::optional<double> snr_db;
  Algorithm algorithm = Algorithm::CombOmp;
  std::uint64_t seed = 0;
};

struct PlantedInstance {
  CombinedDictionary g;
  Vector y;
  Vector delta_true;
};

// Relative recovery error ||dhat - d||^2 / ||d||^2.
double rre(const Vector& delta_hat, const Vector& delta_true);

// Exact-recovery cutoff: RRE below 1e-6.
constexpr double kExactRreCutoff = 1e-6;

// Draws the dictionary, supports, coefficients and optional noise for one
// trial, deterministically from spec.seed. Draw order (fixed): dictionary
// entries, X support, D support, X coefficients, D coefficients, noise.
// Noise is scaled so the realized clean-to-noise energy ratio matches
// snr_db exactly.
PlantedInstance plant_instance(const TrialSpec& spec);

struct TrialRecord {
  TrialSpec spec;
  double rre = 0.0;
  bool exact = false;
  double wall_ms = 0.0;
  Termination termination = Termination::Residual;
};

// One solver invocation on a planted instance; wall time covers the solver
// call only. Stopping: T = M iterations or residual below 1e-6, matching
// the greedy/convex protocol used throughout.
TrialRecord run_trial(const TrialSpec& spec);

struct GridCell {
  int m = 0, kx = 0, kd = 0, sx = 0, sd = 0;
  CoeffModel coeff_model = CoeffModel::Uniform;
  std::optional<double> snr_db;
  Algorithm algorithm = Algorithm::Omp;
  int trials = 0;
  double p_exact = 0.0;
  double mean_rre = 0.0;
  double mean_ms = 0.0;
};

struct GridResult {
  std::vector<GridCell> cells;
};

// Full recovery grid over the sparsity ranges; all algorithms see identical
// instances inside a cell (the per-trial seed does not involve the
// algorithm). threads = 1 runs the serial reference loop, 0 lets OpenMP
// decide; results are identical either way except for measured times.
GridResult run_grid(const TrialSpec& base, const std::vector<int>& sx_range,
                    const std::vector<int>& sd_range, int trials,
                    const std::vector<Algorithm>& algorithms, int threads = 0);

struct PhaseCell {
  int m = 0;
  double rho = 0.0;
  int sg = 0;
  Algorithm algorithm = Algorithm::Bp;
  int trials = 0;
  double p_exact = 0.0;
  double mean_rre = 0.0;
  double mean_ms = 0.0;
};

struct PhaseContourPoint {
  Algorithm algorithm = Algorithm::Bp;
  double level = 0.5;
  int m = 0;
  double sg = 0.0;  // interpolated sparsity at the probability level
};

struct PhaseResult {
  int kg = 0;
  int kx = 0;
  std::vector<PhaseCell> cells;
  std::vector<PhaseContourPoint> contours;  // levels 0.25 / 0.5 / 0.75
};

// Phase-transition sweep: for each (M, rho), Sg = round(rho * M) nonzeros
// split per trial as Sx = floor(tau * Sg), tau ~ U(0,1), clamped to the
// block sizes.
PhaseResult run_phase_transition(int kg, int kx, const std::vector<int>& m_range,
                                 const std::vector<double>& rho_range, int trials,
                                 const std::vector<Algorithm>& algorithms,
                                 std::uint64_t master_seed,
                                 CoeffModel coeff_model = CoeffModel::Uniform,
                                 int threads = 0);

// CSV schemas (documented column orders, '.' decimal separator):
//   grid:    M,Kx,Kd,Sx,Sd,coeff_model,snr_db,algorithm,trials,p_exact,mean_rre,mean_ms
//   phase:   M,rho,Sg,algorithm,trials,p_exact,mean_rre,mean_ms
//   contour: algorithm,level,M,Sg
// mean_ms is measured wall time and is the one column exempt from the
// bit-identical determinism guarantee.
void write_grid_csv(const GridResult& grid, std::ostream& os);
void write_phase_csv(const PhaseResult& phase, std::ostream& os);
void write_contour_csv(const PhaseResult& phase, std::ostream& os);

}  // namespace combrec
