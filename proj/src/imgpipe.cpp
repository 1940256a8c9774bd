#include "gsdie/imgpipe.hpp"

#include "gsdie/errors.hpp"
#include "gsdie/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace gsdie {

namespace {

// 3x3 Gaussian kernel, std 1, normalised to sum 1, then scaled by 9.
const double* patch_kernel() {
  static const auto k = [] {
    std::array<double, 9> w{};
    double sum = 0.0;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        const double v = std::exp(-(dr * dr + dc * dc) / 2.0);
        w[static_cast<std::size_t>((dr + 1) * 3 + dc + 1)] = v;
        sum += v;
      }
    for (double& v : w) v *= 9.0 / sum;
    return w;
  }();
  return k.data();
}

int clamp_idx(int i, int n) { return std::clamp(i, 0, n - 1); }

}  // namespace

FeatureMatrix extract_features(const ImageTensor& img, PixelScale scale) {
  const double factor = pixel_scale_factor(scale);
  const double* kernel = patch_kernel();
  FeatureMatrix fm;
  fm.ell = 9 * img.channels;
  fm.z.resize(img.pixels(), fm.ell);
  Index row = 0;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c, ++row) {
      for (int ch = 0; ch < img.channels; ++ch) {
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            // Replication padding at the borders.
            const double v = img.at(clamp_idx(r + dr, img.height),
                                    clamp_idx(c + dc, img.width), ch);
            fm.z(row, ch * 9 + (dr + 1) * 3 + (dc + 1)) =
                kernel[(dr + 1) * 3 + (dc + 1)] * v * factor;
          }
        }
      }
    }
  }
  return fm;
}

Problem assemble_problem(const ImageTensor& reference, const ImageTensor& labels,
                         const ImageTensor& target, double mu_hat, double sigma,
                         PixelScale scale) {
  if (mu_hat <= 0.0) throw InputError("assemble_problem: mu_hat must be positive");
  if (sigma <= 0.0) throw InputError("assemble_problem: sigma must be positive");
  if (labels.height != reference.height || labels.width != reference.width)
    throw InputError(
        "assemble_problem: label mask and reference image dimensions differ");
  if (labels.channels != 1)
    throw InputError("assemble_problem: label mask must be single-channel");
  if (reference.channels != target.channels)
    throw InputError("assemble_problem: reference and target channel counts differ");

  const FeatureMatrix ref_features = extract_features(reference, scale);
  const FeatureMatrix tgt_features = extract_features(target, scale);

  Problem p;
  p.n_ref = reference.pixels();
  p.n_target = target.pixels();
  p.n = p.n_ref + p.n_target;
  auto joint = std::make_shared<FeatureMatrix>();
  joint->ell = ref_features.ell;
  joint->z.resize(p.n, joint->ell);
  joint->z.topRows(p.n_ref) = ref_features.z;
  joint->z.bottomRows(p.n_target) = tgt_features.z;
  p.features = joint;
  p.sim = GaussianSimilarity{sigma, joint->ell};

  const double denom = static_cast<double>(joint->ell) * sigma * sigma;
  p.weight = [features = p.features, denom](Index i, Index j) -> double {
    if (i == j) return 0.0;  // no self-loops even though Omega(z,z) = 1
    const double d2 = (features->z.row(i) - features->z.row(j)).squaredNorm();
    return std::exp(-d2 / denom);
  };

  Vector mu = Vector::Zero(p.n);
  Vector f_tilde = Vector::Zero(p.n);
  p.u0 = Vector::Constant(p.n, 0.49);
  for (Index i = 0; i < p.n_ref; ++i) {
    const double v = labels.data[static_cast<std::size_t>(i)];
    if (v != 0.0 && v != 1.0)
      throw InputError("assemble_problem: label mask must be binary (0 or full scale)");
    mu(i) = mu_hat;
    f_tilde(i) = v;
    p.u0(i) = v;
    p.z_indices.push_back(i);
  }
  p.fid = FidelityData::make(std::move(mu), std::move(f_tilde));
  return p;
}

namespace {

// Fixed bank of low-frequency modes for the synthetic texture. A spatially
// correlated field keeps the feature vectors on a smooth low-dimensional
// manifold the way natural images do; i.i.d. per-pixel grain would act like a
// diagonal kernel perturbation that rank-K Nystrom interpolation cannot
// represent, destabilising the degree estimate.
struct TextureMode {
  double amplitude, fr, fc, phase;
};

const std::vector<TextureMode>& texture_modes() {
  static const auto modes = [] {
    std::vector<TextureMode> m;
    SplitMix64 rng(0x7E47u);
    for (int i = 0; i < 4; ++i) {
      TextureMode tm;
      tm.amplitude = 0.015 + 0.02 * rng.uniform01();
      tm.fr = std::floor(rng.uniform01() * 7.0) - 3.0;
      tm.fc = std::floor(rng.uniform01() * 7.0) - 3.0;
      tm.phase = 2.0 * M_PI * rng.uniform01();
      m.push_back(tm);
    }
    return m;
  }();
  return modes;
}

double texture(int r, int c, int size) {
  double v = 0.0;
  for (const TextureMode& m : texture_modes())
    v += m.amplitude *
         std::sin(2.0 * M_PI * (m.fr * r + m.fc * c) / size + m.phase);
  return v;
}

bool inside_disk(int r, int c, int size) {
  const double cx = (size - 1) / 2.0;
  const double radius = 0.3 * size;
  const double dr = r - cx, dc = c - cx;
  return dr * dr + dc * dc <= radius * radius;
}

}  // namespace

ImageTensor synthetic_two_tone(int size, double noise_sigma, std::uint64_t noise_seed) {
  ImageTensor img = ImageTensor::create(size, size, 1);
  SplitMix64 noise(noise_seed ^ 0xA5A5A5A5ULL);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      // Moderate tone separation keeps the cross-tone kernel weights finite,
      // like a natural image; fully binary tones make w nearly block
      // diagonal and break the Nystrom degree estimate.
      double v = (inside_disk(r, c, size) ? 0.65 : 0.35) + texture(r, c, size);
      if (noise_sigma > 0.0) v += noise_sigma * noise.normal();
      img.at(r, c, 0) = std::clamp(v, 0.0, 1.0);
    }
  return img;
}

ImageTensor synthetic_disk_labels(int size) {
  ImageTensor img = ImageTensor::create(size, size, 1);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c)
      img.at(r, c, 0) = inside_disk(r, c, size) ? 1.0 : 0.0;
  return img;
}

bool is_builtin_spec(const std::string& spec) { return spec.rfind("builtin:", 0) == 0; }

namespace {

struct BuiltinSpec {
  int size = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

BuiltinSpec parse_builtin(const std::string& spec) {
  BuiltinSpec out;
  std::stringstream ss(spec.substr(8));
  std::string part;
  int field = 0;
  while (std::getline(ss, part, ':')) {
    try {
      if (field == 0) out.size = std::stoi(part);
      if (field == 1) out.noise = std::stod(part);
      if (field == 2) out.seed = std::stoull(part);
    } catch (const std::exception&) {
      throw InputError("bad builtin image spec: " + spec);
    }
    ++field;
  }
  if (out.size < 8 || out.size > 512)
    throw InputError("builtin image size must be in [8, 512]: " + spec);
  return out;
}

}  // namespace

ImageTensor load_image_spec(const std::string& spec) {
  if (!is_builtin_spec(spec)) return read_image(spec);
  const BuiltinSpec b = parse_builtin(spec);
  return synthetic_two_tone(b.size, b.noise, b.seed);
}

ImageTensor load_labels_spec(const std::string& spec) {
  if (!is_builtin_spec(spec)) return read_image(spec);
  return synthetic_disk_labels(parse_builtin(spec).size);
}

}  // namespace gsdie
