#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "combrec/linalg.hpp"

namespace combrec {

// Overcomplete representation basis; columns are unit-norm atoms.
class Dictionary {
 public:
  Dictionary() = default;  // empty; fill via from_columns

  // Normalizes each column to unit norm. Zero columns are rejected here so
  // the solvers never see them.
  static Dictionary from_columns(Matrix atoms);

  const Matrix& atoms() const { return atoms_; }
  Eigen::Index rows() const { return atoms_.rows(); }
  Eigen::Index size() const { return atoms_.cols(); }
  Vector atom(Eigen::Index i) const { return atoms_.col(i); }

 private:
  explicit Dictionary(Matrix atoms) : atoms_(std::move(atoms)) {}
  Matrix atoms_;
};

// Concatenation [X | D]; columns before `split` form the non-negative block.
struct CombinedDictionary {
  Dictionary g;
  Eigen::Index split = 0;  // Kx

  Eigen::Index kx() const { return split; }
  Eigen::Index kd() const { return g.size() - split; }
  Eigen::Index kg() const { return g.size(); }
  Matrix x_block() const { return g.atoms().leftCols(split); }
  Matrix d_block() const { return g.atoms().rightCols(kd()); }
};

CombinedDictionary make_combined(Matrix x, Matrix d);

struct CoherenceProfile {
  double mu_x = 0.0;
  double mu_d = 0.0;
  double mu_g = 0.0;   // cross-coherence between the blocks
  double mu_m = 0.0;   // max(mu_x, mu_d, mu_g)
  double sigma_x = 0.0;
};

// i.i.d. N(0,1) entries (column-major fill order), then column normalization.
// Deterministic in the seed; see rng.hpp for the generator contract.
Dictionary gaussian_dictionary(Eigen::Index m, Eigen::Index k, std::uint64_t seed);

// Orthonormal 2-D DCT-II basis on side x side patches, atoms vectorized
// column-major; the (patch_side^2) columns satisfy D^T D = I.
Dictionary dct2d_dictionary(Eigen::Index patch_side);

// X = -I, the sign convention for saturation noise atoms.
Dictionary negated_identity_dictionary(Eigen::Index n);

// Two-sided coherence: max_{i != j} |x_i^T x_j| / (||x_i|| ||x_j||).
double coherence(const Dictionary& d);

// One-sided coherence on a possibly unnormalized matrix:
// max_{i != j} |x_i^T x_j| / ||x_i||^2.
double one_sided_coherence(const Matrix& x);

// Cross-coherence over all pairs (i, j), including equal indices.
double cross_coherence(const Dictionary& x, const Dictionary& d);

CoherenceProfile coherence_profile(const CombinedDictionary& g);

struct MPlusCertificate {
  bool member = false;
  Vector h;  // certificate with min(h^T X) >= tol when member
};

// Decides whether the row span of X meets the positive orthant by solving
// the feasibility program  exists h : h^T X >= tol * 1.
MPlusCertificate is_m_plus(const Dictionary& x, double tol);

// Flat CSV matrix format: "rows,cols" header line, then one row per line.
void save_matrix_csv(const Matrix& m, std::ostream& os);
void save_matrix_csv(const Matrix& m, const std::string& path);
Matrix load_matrix_csv(std::istream& is);
Matrix load_matrix_csv(const std::string& path);

}  // namespace combrec
