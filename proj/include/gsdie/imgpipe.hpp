#pragma once

#include "gsdie/graph.hpp"
#include "gsdie/image.hpp"
#include "gsdie/types.hpp"

#include <cstdint>
#include <memory>

namespace gsdie {

// Pixel scale the feature vectors are computed on. Customary sigma values
// (20-50) presuppose 0..255 samples, so byte is the default.
enum class PixelScale { unit, byte };

inline double pixel_scale_factor(PixelScale s) {
  return s == PixelScale::byte ? 255.0 : 1.0;
}

// Per-pixel feature vectors: the replication-padded 3x3 patch of each
// channel, weighted elementwise by 9x a 3x3 Gaussian kernel (std 1, sum 1),
// flattened row-major; ell = 9 * channels. Rows follow row-major pixel order.
struct FeatureMatrix {
  Matrix z;  // n x ell
  Index ell = 0;
};

FeatureMatrix extract_features(const ImageTensor& img, PixelScale scale);

// Assembled two-image classification problem: reference pixels first, then
// target pixels. Z is the reference block; u0 is the reference labels on Z
// and 0.49 on the target block.
struct Problem {
  Index n = 0;
  Index n_ref = 0;
  Index n_target = 0;
  std::shared_ptr<const FeatureMatrix> features;  // joint, n rows
  GaussianSimilarity sim;
  WeightFn weight;  // Gaussian similarity of features, zero diagonal
  FidelityData fid;
  Vector u0;
  IndexList z_indices;
};

Problem assemble_problem(const ImageTensor& reference, const ImageTensor& labels,
                         const ImageTensor& target, double mu_hat, double sigma,
                         PixelScale scale);

// Built-in synthetic data so every benchmark runs without external images: a
// two-tone disk with a fixed deterministic texture, optional additive
// Gaussian pixel noise (unit scale), all greyscale.
ImageTensor synthetic_two_tone(int size, double noise_sigma = 0.0,
                               std::uint64_t noise_seed = 0);
ImageTensor synthetic_disk_labels(int size);

// "builtin:SIZE" or "builtin:SIZE:NOISE:SEED" image specifiers used by the
// CLI; falls back to reading the path as a file.
ImageTensor load_image_spec(const std::string& spec);
bool is_builtin_spec(const std::string& spec);
// The matching label mask for a builtin spec.
ImageTensor load_labels_spec(const std::string& spec);

}  // namespace gsdie
