#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "combrec/bench.hpp"

namespace combrec {

// Grayscale image with intensities in [0, 255]; processed as raw values,
// no mean removal (the DC atom of the DCT dictionary covers the offset).
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // row-major

  double& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

// 8-bit binary PGM (P5) only.
GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& img, const std::string& path);

struct SaturationResult {
  GrayImage image;
  std::vector<std::uint8_t> mask;  // 1 where a pixel was driven to 255
};

// Pins floor(fraction * N) uniformly chosen pixel positions to 255.
// Positions already at 255 may be chosen; they still count in the mask.
SaturationResult saturate(const GrayImage& img, double fraction,
                          std::uint64_t seed);

struct ImageRecovery {
  GrayImage image;
  std::vector<SparseSolution> patch_solutions;  // row-major patch order
  int stalled_patches = 0;
};

// Patchwise recovery over the combined dictionary [-I | DCT] on
// non-overlapping 8x8 patches. Each patch is negated before solving so the
// negated-identity block with non-negative coefficients carries the upward
// saturation spikes; the recovered patch is the (sign-restored) DCT part,
// clamped to [0, 255]. Recovery can only lower pixel values. Solvers that
// stall on a patch leave it untouched (counted). Dimensions must be
// divisible by 8. Patches solve independently; threads = 1 is the serial
// reference loop.
ImageRecovery recover_image(const GrayImage& img, Algorithm algorithm,
                            double eps = 1e-6, int threads = 0);

// 10 log10(255^2 / MSE); +inf for identical images.
double psnr(const GrayImage& reference, const GrayImage& test);

// Patch plumbing, exposed for tests: column-major vectorization of the
// 8x8 patch with top-left corner (row0, col0).
constexpr int kPatchSide = 8;
Vector extract_patch(const GrayImage& img, int row0, int col0);
void insert_patch(GrayImage& img, int row0, int col0, const Vector& patch);

}  // namespace combrec
