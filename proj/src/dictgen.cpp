#include "combrec/dictgen.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "combrec/lp.hpp"
#include "combrec/rng.hpp"

namespace combrec {

Dictionary Dictionary::from_columns(Matrix atoms) {
  if (atoms.rows() < 1 || atoms.cols() < 1) {
    throw std::invalid_argument("Dictionary: empty matrix");
  }
  require_finite(atoms, "Dictionary");
  for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
    const double n = atoms.col(j).norm();
    if (n == 0.0) {
      throw std::invalid_argument("Dictionary: zero column at index " +
                                  std::to_string(j));
    }
    atoms.col(j) /= n;
  }
  return Dictionary(std::move(atoms));
}

CombinedDictionary make_combined(Matrix x, Matrix d) {
  if (x.cols() > 0 && d.cols() > 0 && x.rows() != d.rows()) {
    throw std::invalid_argument("make_combined: row mismatch");
  }
  const Eigen::Index rows = x.cols() > 0 ? x.rows() : d.rows();
  Matrix g(rows, x.cols() + d.cols());
  if (x.cols() > 0) g.leftCols(x.cols()) = x;
  if (d.cols() > 0) g.rightCols(d.cols()) = d;
  return CombinedDictionary{Dictionary::from_columns(std::move(g)), x.cols()};
}

Dictionary gaussian_dictionary(Eigen::Index m, Eigen::Index k, std::uint64_t seed) {
  if (m < 1 || k < 1) {
    throw std::invalid_argument("gaussian_dictionary: sizes must be >= 1");
  }
  Rng rng(seed);
  Matrix a(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) a(i, j) = rng.normal();
  }
  return Dictionary::from_columns(std::move(a));
}

Dictionary dct2d_dictionary(Eigen::Index patch_side) {
  if (patch_side < 1) {
    throw std::invalid_argument("dct2d_dictionary: patch_side must be >= 1");
  }
  const auto n = patch_side;
  Matrix c(n, n);  // row k = frequency-k DCT-II vector
  const double pi = 3.141592653589793238462643383279502884;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      c(k, i) = scale * std::cos(pi * (2.0 * static_cast<double>(i) + 1.0) *
                                 static_cast<double>(k) /
                                 (2.0 * static_cast<double>(n)));
    }
  }
  // Atom (ku, kv) is the outer product basis image, vectorized column-major;
  // laid out as the Kronecker product so column index = kv * n + ku.
  Matrix d(n * n, n * n);
  for (Eigen::Index kv = 0; kv < n; ++kv) {
    for (Eigen::Index ku = 0; ku < n; ++ku) {
      for (Eigen::Index col = 0; col < n; ++col) {
        for (Eigen::Index row = 0; row < n; ++row) {
          d(col * n + row, kv * n + ku) = c(ku, row) * c(kv, col);
        }
      }
    }
  }
  return Dictionary::from_columns(std::move(d));
}

Dictionary negated_identity_dictionary(Eigen::Index n) {
  return Dictionary::from_columns(-Matrix::Identity(n, n));
}

double coherence(const Dictionary& d) {
  if (d.size() < 2) {
    throw std::invalid_argument("coherence: need at least two atoms");
  }
  const Matrix gram = d.atoms().transpose() * d.atoms();
  double mu = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j) {
      mu = std::max(mu, std::abs(gram(i, j)));
    }
  }
  return std::min(mu, 1.0);
}

double one_sided_coherence(const Matrix& x) {
  if (x.cols() < 2) {
    throw std::invalid_argument("one_sided_coherence: need at least two columns");
  }
  Vector sq = x.colwise().squaredNorm();
  for (Eigen::Index i = 0; i < sq.size(); ++i) {
    if (sq[i] == 0.0) {
      throw std::invalid_argument("one_sided_coherence: zero column");
    }
  }
  const Matrix gram = x.transpose() * x;
  double sigma = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = 0; j < gram.cols(); ++j) {
      if (i == j) continue;
      sigma = std::max(sigma, std::abs(gram(i, j)) / sq[i]);
    }
  }
  return sigma;
}

double cross_coherence(const Dictionary& x, const Dictionary& d) {
  if (x.rows() != d.rows()) {
    throw std::invalid_argument("cross_coherence: row mismatch");
  }
  return std::min((x.atoms().transpose() * d.atoms()).cwiseAbs().maxCoeff(), 1.0);
}

CoherenceProfile coherence_profile(const CombinedDictionary& g) {
  CoherenceProfile p;
  const Matrix x = g.x_block();
  const Matrix d = g.d_block();
  p.mu_x = x.cols() >= 2 ? coherence(Dictionary::from_columns(x)) : 0.0;
  p.mu_d = d.cols() >= 2 ? coherence(Dictionary::from_columns(d)) : 0.0;
  p.mu_g = (x.cols() >= 1 && d.cols() >= 1)
               ? cross_coherence(Dictionary::from_columns(x),
                                 Dictionary::from_columns(d))
               : 0.0;
  p.mu_m = std::max({p.mu_x, p.mu_d, p.mu_g});
  p.sigma_x = x.cols() >= 2 ? one_sided_coherence(x) : 0.0;
  return p;
}

MPlusCertificate is_m_plus(const Dictionary& x, double tol) {
  if (tol <= 0.0) tol = 1e-9;
  MPlusCertificate cert;
  // The system h^T X >= tol 1 is a cone: solve it with unit margin (well
  // scaled for the simplex) and rescale the certificate.
  auto h = lp_find_point(x.atoms(), Vector::Ones(x.size()), Matrix(x.rows(), 0),
                         Vector(0));
  if (h) {
    cert.member = true;
    cert.h = tol * std::move(*h);
  }
  return cert;
}

void save_matrix_csv(const Matrix& m, std::ostream& os) {
  os << m.rows() << "," << m.cols() << "\n";
  os.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ",";
      os << m(i, j);
    }
    os << "\n";
  }
}

void save_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_matrix_csv: cannot open " + path);
  save_matrix_csv(m, f);
}

Matrix load_matrix_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) {
    throw std::runtime_error("load_matrix_csv: empty input");
  }
  auto comma = line.find(',');
  if (comma == std::string::npos) {
    throw std::runtime_error("load_matrix_csv: malformed header");
  }
  const auto rows = std::stoll(line.substr(0, comma));
  const auto cols = std::stoll(line.substr(comma + 1));
  if (rows < 1 || cols < 1) {
    throw std::runtime_error("load_matrix_csv: bad dimensions");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) {
      throw std::runtime_error("load_matrix_csv: truncated input");
    }
    std::stringstream ss(line);
    std::string cell;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error("load_matrix_csv: short row");
      }
      m(i, j) = std::stod(cell);
    }
  }
  return m;
}

Matrix load_matrix_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_matrix_csv: cannot open " + path);
  return load_matrix_csv(f);
}

}  // namespace combrec
