#include "combrec/imaging.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "combrec/rng.hpp"

namespace combrec {

GrayImage read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_pgm: cannot open " + path);

  auto next_token = [&f, &path]() {
    std::string tok;
    while (true) {
      int c = f.get();
      if (c == EOF) throw std::runtime_error("read_pgm: truncated header in " + path);
      if (c == '#') {
        while (c != EOF && c != '\n') c = f.get();
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) return tok;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
  };

  if (next_token() != "P5") {
    throw std::runtime_error("read_pgm: not a binary PGM (P5): " + path);
  }
  const int width = std::stoi(next_token());
  const int height = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (width < 1 || height < 1 || maxval != 255) {
    throw std::runtime_error("read_pgm: unsupported dimensions or depth in " + path);
  }

  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(static_cast<std::size_t>(width) * height);
  std::vector<std::uint8_t> raw(img.pixels.size());
  f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (f.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw std::runtime_error("read_pgm: truncated pixel data in " + path);
  }
  for (std::size_t i = 0; i < raw.size(); ++i) img.pixels[i] = raw[i];
  return img;
}

void write_pgm(const GrayImage& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
  f << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<std::uint8_t> raw(img.pixels.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = std::min(255.0, std::max(0.0, std::round(img.pixels[i])));
    raw[i] = static_cast<std::uint8_t>(v);
  }
  f.write(reinterpret_cast<const char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
}

SaturationResult saturate(const GrayImage& img, double fraction,
                          std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw std::invalid_argument("saturate: fraction must lie in [0, 1]");
  }
  SaturationResult out;
  out.image = img;
  out.mask.assign(img.pixels.size(), 0);
  const int n = static_cast<int>(img.pixels.size());
  const int count = static_cast<int>(std::floor(fraction * n));
  Rng rng(seed);
  for (int pos : rng.sample_without_replacement(n, count)) {
    out.image.pixels[static_cast<std::size_t>(pos)] = 255.0;
    out.mask[static_cast<std::size_t>(pos)] = 1;
  }
  return out;
}

Vector extract_patch(const GrayImage& img, int row0, int col0) {
  Vector v(kPatchSide * kPatchSide);
  for (int c = 0; c < kPatchSide; ++c) {
    for (int r = 0; r < kPatchSide; ++r) {
      v[c * kPatchSide + r] = img.at(row0 + r, col0 + c);
    }
  }
  return v;
}

void insert_patch(GrayImage& img, int row0, int col0, const Vector& patch) {
  for (int c = 0; c < kPatchSide; ++c) {
    for (int r = 0; r < kPatchSide; ++r) {
      img.at(row0 + r, col0 + c) = patch[c * kPatchSide + r];
    }
  }
}

ImageRecovery recover_image(const GrayImage& img, Algorithm algorithm,
                            double eps, int threads) {
  if (img.width % kPatchSide != 0 || img.height % kPatchSide != 0) {
    throw std::invalid_argument(
        "recover_image: dimensions must be divisible by 8");
  }
  if (threads <= 0) {
#ifdef _OPENMP
    threads = omp_get_max_threads();
#else
    threads = 1;
#endif
  }

  const int n = kPatchSide * kPatchSide;
  const CombinedDictionary g = make_combined(
      negated_identity_dictionary(n).atoms(), dct2d_dictionary(kPatchSide).atoms());
  const Matrix dct = g.d_block();

  const int patches_x = img.width / kPatchSide;
  const int patches_y = img.height / kPatchSide;
  const int patch_count = patches_x * patches_y;

  ImageRecovery out;
  out.image = img;
  out.patch_solutions.resize(static_cast<std::size_t>(patch_count));
  std::vector<std::uint8_t> stalled(static_cast<std::size_t>(patch_count), 0);

  auto solve_patch = [&](int p) {
    const int row0 = (p / patches_x) * kPatchSide;
    const int col0 = (p % patches_x) * kPatchSide;
    // Solvers see the negated patch: the negated-identity block with
    // non-negative coefficients then carries the upward saturation spikes,
    // and the clean patch comes back as -(D beta).
    const Vector y = -extract_patch(img, row0, col0);

    SparseSolution sol;
    bool ok = true;
    try {
      StoppingCriteria stop{n, eps};
      PathSolverConfig cfg;
      cfg.residual_tol = eps;
      switch (algorithm) {
        case Algorithm::Omp: sol = omp_solve(g.g, y, stop); break;
        case Algorithm::CombOmp: sol = comb_omp_solve(g, y, stop); break;
        case Algorithm::Bp: sol = bp_solve(g.g, y, cfg); break;
        case Algorithm::CombBp: sol = comb_bp_solve(g, y, cfg); break;
        default:
          throw std::invalid_argument("recover_image: unsupported algorithm " +
                                      to_string(algorithm));
      }
      if (sol.termination == Termination::Stalled) ok = false;
    } catch (const path_limit_error& e) {
      sol = e.partial_solution;
      ok = false;
    } catch (const std::runtime_error&) {
      ok = false;
    }
    return std::pair<SparseSolution, bool>(std::move(sol), ok);
  };

  const auto count = static_cast<std::ptrdiff_t>(patch_count);
  if (threads == 1) {
    for (std::ptrdiff_t p = 0; p < count; ++p) {
      auto [sol, ok] = solve_patch(static_cast<int>(p));
      stalled[static_cast<std::size_t>(p)] = ok ? 0 : 1;
      out.patch_solutions[static_cast<std::size_t>(p)] = std::move(sol);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
    for (std::ptrdiff_t p = 0; p < count; ++p) {
      auto [sol, ok] = solve_patch(static_cast<int>(p));
      stalled[static_cast<std::size_t>(p)] = ok ? 0 : 1;
      out.patch_solutions[static_cast<std::size_t>(p)] = std::move(sol);
    }
  }

  for (int p = 0; p < patch_count; ++p) {
    const int row0 = (p / patches_x) * kPatchSide;
    const int col0 = (p % patches_x) * kPatchSide;
    if (stalled[static_cast<std::size_t>(p)]) {
      ++out.stalled_patches;  // leave the raw patch in place
      continue;
    }
    const SparseSolution& sol = out.patch_solutions[static_cast<std::size_t>(p)];
    Vector recon = -(dct * sol.delta.tail(n));
    for (Eigen::Index i = 0; i < recon.size(); ++i) {
      recon[i] = std::min(255.0, std::max(0.0, recon[i]));
    }
    insert_patch(out.image, row0, col0, recon);
  }
  return out;
}

double psnr(const GrayImage& reference, const GrayImage& test) {
  if (reference.width != test.width || reference.height != test.height) {
    throw std::invalid_argument("psnr: dimension mismatch");
  }
  double mse = 0.0;
  for (std::size_t i = 0; i < reference.pixels.size(); ++i) {
    const double d = reference.pixels[i] - test.pixels[i];
    mse += d * d;
  }
  mse /= static_cast<double>(reference.pixels.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace combrec
