#pragma once

#include "gsdie/expsolver.hpp"
#include "gsdie/imgpipe.hpp"
#include "gsdie/lowrank.hpp"
#include "gsdie/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gsdie {

struct SlopeFit {
  double slope = 0.0;
  int points = 0;
};

// Least-squares slope of log(err) against log(x), excluding entries at or
// below the machine-precision floor.
SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& err,
                          double floor = 1e-13);

// Single-image benchmark graph: Gaussian-similarity weights on the feature
// vectors, fidelity support on the left half of the pixels.
struct BenchGraph {
  Index n = 0;
  std::shared_ptr<const FeatureMatrix> features;
  WeightFn weight;
  IndexList z;  // left-half pixel indices
};

BenchGraph bench_graph_from_image(const ImageTensor& img, double sigma, PixelScale scale);

// Dense symmetric normalised Laplacian of a weight accessor (benchmark scale
// only); also reports exact degrees.
Matrix materialize_delta_s(const WeightFn& weight, Index n, Vector* degrees = nullptr);

// Optimal relative errors |Delta_s - best rank-K|_F / |Delta_s|_F for each K,
// from the eigenvalue tail (Eckart-Young).
std::vector<double> truncated_svd_errors(const Matrix& delta_s,
                                         const std::vector<Index>& ranks);

struct PairedNystromError {
  double qr_error = 0.0;
  double classic_error = 0.0;
  double qr_seconds = 0.0;
  double classic_seconds = 0.0;
  ClassicStats classic_stats;
};

// Runs both Nystrom factorisations on the same interpolation sets and
// evaluates both relative Frobenius errors around one shared dense product
// Delta_s * C (both factors live in the column space of the scaled block C).
PairedNystromError bench_nystrom_pair(const BenchGraph& bg, const Matrix& delta_s,
                                      double delta_s_fro2, Index rank,
                                      std::uint64_t seed);

struct ExpmBenchRow {
  std::string scheme;
  int k = 0;
  Index rank = 0;
  double rel_l2_error = 0.0;
  double seconds = 0.0;
};

struct ExpmBenchResult {
  std::vector<ExpmBenchRow> rows;
  double slope_euler = 0.0;
  double slope_strang = 0.0;
  double slope_yoshida = 0.0;
};

// Propagation error against the dense oracle across substep counts, on a
// random connected graph with fidelity on the first half of the vertices.
// full_rank = false truncates the spectrum at K = ceil(sqrt(n)).
ExpmBenchResult bench_expm(Index n, double tau, const std::vector<int>& substeps,
                           bool full_rank, std::uint64_t seed);

struct BBenchRow {
  std::string method;
  int param = 0;  // k_b, or m for composite Simpson
  Index rank = 0;
  double tau = 0.0;
  double rel_l2_error = 0.0;
};

// Errors of every b method against the dense integral oracle over a
// (tau, rank) grid; rank 0 means full rank.
std::vector<BBenchRow> bench_b(Index n, const std::vector<double>& taus,
                               const std::vector<Index>& ranks, int k_b, int simpson_m,
                               std::uint64_t seed);

}  // namespace gsdie
