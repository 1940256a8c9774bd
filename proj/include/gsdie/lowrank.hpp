#pragma once

#include "gsdie/types.hpp"

#include <cstdint>

namespace gsdie {

// Rank-K factors of a graph Laplacian from the Nystrom extension:
//   Delta_s ~ Us * diag(lambda) * Us^T          (symmetric normalised)
//   Delta   ~ U1 * diag(lambda) * U2^T          (random walk)
// with U1 = d_hat^{-1/2} .* Us and U2 = d_hat^{1/2} .* Us (row scaling).
// For the symmetric normalisation U1 = U2 = Us, so propagation code can use
// u1/u2 uniformly.
struct LowRankLaplacian {
  Index rank = 0;
  Vector lambda;  // K approximate eigenvalues, Lambda = I_K - Sigma
  Matrix us;      // n x K, approximately orthonormal columns
  Vector d_hat;   // estimated (or exact) degrees, strictly positive
  Normalization normalization = Normalization::symmetric;
  Matrix u1, u2;  // n x K factors selected by `normalization`

  Index size() const { return us.rows(); }
};

// Nystrom interpolation sets: X1 from V \ Z of size ceil(K/2), X2 from Z of
// size floor(K/2). Sampling is uniform without replacement and deterministic
// per seed; each set is stored sorted.
struct InterpolationSets {
  IndexList x1, x2;
  std::uint64_t seed = 0;
  IndexList joined() const;  // X = X1 u X2, sorted
};

InterpolationSets sample_interpolation_sets(Index n, const IndexList& z, Index rank,
                                            std::uint64_t seed);

// Internal blocks exposed for benchmarking: both Nystrom variants produce
// factors inside the column space of c = d_hat^{-1/2} .* w_VX, with
// U = c * transform, which lets a benchmark share the expensive dense
// residual product across methods.
struct NystromDetails {
  IndexList x;
  Matrix c;          // scaled column block, n x K
  Matrix transform;  // K x K, factors = c * transform
};

// Shared intermediates of the two Nystrom variants: interpolation set, kernel
// blocks, degree estimate and the scaled column block. Building them checks
// the conditioning of w_XX and the positivity of d_hat.
struct NystromBlocks {
  IndexList x;
  Matrix w_xx;   // K x K kernel block
  Matrix c;      // d_hat^{-1/2} .* w_VX, n x K
  Vector d_hat;  // strictly positive
  Vector dx;     // d_hat restricted to X
};

NystromBlocks build_nystrom_blocks(const WeightFn& weight, Index n, const IndexList& x);
LowRankLaplacian nystrom_qr_from_blocks(const NystromBlocks& blocks,
                                        Normalization normalization,
                                        NystromDetails* details = nullptr);

// Algorithm: sample X; build w_XX, w_VX; degree estimate
// d_hat = w_VX (w_XX^{-1} (w_VX^T 1)); row-scale; thin QR; eigendecompose
// R w_XX^{-1} R^T (symmetrised); assemble Us = Q Phi, Lambda = I - Sigma.
// Errors: nonpositive d_hat entries and ill-conditioned w_XX are reported,
// not clamped.
LowRankLaplacian nystrom_qr(const WeightFn& weight, Index n, const IndexList& z,
                            Index rank, std::uint64_t seed,
                            Normalization normalization,
                            NystromDetails* details = nullptr);
LowRankLaplacian nystrom_qr(const WeightFn& weight, Index n,
                            const InterpolationSets& sets,
                            Normalization normalization,
                            NystromDetails* details = nullptr);

// One-shot Nystrom with symmetric orthogonalisation through the matrix square
// root of w_XX. Since w_XX has zero trace it is indefinite, so the square
// root is complex; imaginary parts of the final factors are discarded and
// counted in `complex_discards` (with the largest discarded magnitude in
// `max_imag`). Benchmark baseline only.
struct ClassicStats {
  int complex_discards = 0;
  double max_imag = 0.0;
  int nonfinite_eigs = 0;
};

LowRankLaplacian nystrom_classic(const WeightFn& weight, Index n, const IndexList& z,
                                 Index rank, std::uint64_t seed,
                                 Normalization normalization,
                                 ClassicStats* stats = nullptr,
                                 NystromDetails* details = nullptr);
LowRankLaplacian nystrom_classic(const WeightFn& weight, Index n,
                                 const InterpolationSets& sets,
                                 Normalization normalization,
                                 ClassicStats* stats = nullptr,
                                 NystromDetails* details = nullptr);
LowRankLaplacian nystrom_classic_from_blocks(const NystromBlocks& blocks,
                                             Normalization normalization,
                                             ClassicStats* stats = nullptr,
                                             NystromDetails* details = nullptr);

// Optimal rank-K approximation of the dense symmetric normalised Laplacian
// (Eckart-Young): keeps the K leading eigenpairs. `degrees` supplies exact
// degrees for the U1/U2 scaling.
LowRankLaplacian truncated_svd_baseline(const Matrix& delta_s, Index rank,
                                        const Vector& degrees,
                                        Normalization normalization);

// |Us Lambda Us^T - Delta_s|_F / |Delta_s|_F, evaluated without forming the
// n x n residual.
double relative_frobenius_error(const LowRankLaplacian& approx, const Matrix& delta_s);

}  // namespace gsdie
