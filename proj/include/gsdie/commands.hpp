#pragma once

#include "gsdie/imgpipe.hpp"
#include "gsdie/sdie.hpp"
#include "gsdie/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gsdie {

// Full run configuration; defaults follow the reference two-image setup
// (eps = tau = 0.003, mu_hat = 30, sigma = 35, k = k_b = 1, delta = 1e-10,
// K = 70, symmetric normalisation). Serialised as flat key=value text.
struct RunConfig {
  double eps = 0.003;
  double tau = 0.003;
  double delta = 1e-10;
  int max_iter = 1000;
  std::string scheme = "strang";
  int k = 1;
  int k_b = 1;
  std::string b_method = "ode_euler";
  int simpson_m = 500;
  double mu_hat = 30.0;
  double sigma = 35.0;
  Index rank = 70;
  std::string normalization = "symmetric";
  std::string pixel_scale = "byte";
  std::uint64_t seed = 1;
  bool trace = false;
  std::string ref_image;
  std::string ref_labels;
  std::string target_image;
  std::string ground_truth;
  std::string out_dir = "gsdie-out";

  PropagatorConfig propagator() const;
  SdieParams sdie_params() const;
  Normalization norm() const;
  PixelScale scale() const;

  // Flat key=value serialisation; the emitted file reloads as a config file.
  std::string to_key_values() const;
};

struct SegmentResult {
  LabelState state;
  Index n_ref = 0;
  Index n_target = 0;
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> mask;  // thresholded target labels, row-major
  std::optional<double> error;    // fraction of mislabelled target pixels
  double seconds = 0.0;
};

// Library entry points behind the CLI commands.
SegmentResult run_segment(const RunConfig& cfg);

struct MonteCarloResult {
  std::vector<SegmentResult> runs;
  std::vector<double> mean;  // pointwise mean of binary labels
  std::vector<double> std;   // pointwise population standard deviation
  int height = 0;
  int width = 0;
};

MonteCarloResult run_montecarlo(const RunConfig& cfg, int repeats);

int cmd_segment(const RunConfig& cfg);
int cmd_montecarlo(const RunConfig& cfg, int repeats);
int cmd_bench_lowrank(const std::string& image_spec, const std::vector<Index>& ranks,
                      int repeats, double sigma, const std::string& pixel_scale,
                      std::uint64_t seed, const std::string& out_dir);
int cmd_bench_expm(Index n, double tau, const std::vector<int>& substeps,
                   const std::string& rank_mode, std::uint64_t seed,
                   const std::string& out_dir);
int cmd_bench_b(Index n, const std::vector<double>& taus,
                const std::vector<Index>& ranks, int k_b, int simpson_m,
                std::uint64_t seed, const std::string& out_dir);
int cmd_verify(std::uint64_t seed, int trials, const std::string& out_dir);

// Exit codes: 0 ok, 1 input error, 2 numeric failure, 3 property battery
// failure.
int run_cli(int argc, const char* const* argv);

}  // namespace gsdie
