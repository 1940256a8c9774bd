#include "gsdie/lowrank.hpp"

#include "gsdie/errors.hpp"
#include "gsdie/graph.hpp"
#include "gsdie/oracle.hpp"
#include "gsdie/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace gsdie;

namespace {

WeightFn matrix_weight(const Matrix& w) {
  return [&w](Index i, Index j) { return w(i, j); };
}

InterpolationSets full_sets(Index n, const IndexList& z) {
  InterpolationSets sets;
  std::vector<char> in_z(static_cast<std::size_t>(n), 0);
  for (Index i : z) in_z[static_cast<std::size_t>(i)] = 1;
  for (Index i = 0; i < n; ++i)
    (in_z[static_cast<std::size_t>(i)] ? sets.x2 : sets.x1).push_back(i);
  return sets;
}

// Kernel-type weights (the regime Nystrom targets): Gaussian similarity of
// random planar points, complete graph.
Matrix kernel_weights(Index n, double sigma, SplitMix64& rng) {
  Matrix pts(n, 2);
  for (Index i = 0; i < n; ++i) {
    pts(i, 0) = rng.uniform01();
    pts(i, 1) = rng.uniform01();
  }
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double d2 = (pts.row(i) - pts.row(j)).squaredNorm();
      w(i, j) = w(j, i) = std::exp(-d2 / (sigma * sigma));
    }
  return w;
}

}  // namespace

TEST_SUITE_BEGIN("lowrank");

TEST_CASE("interpolation set sampling") {
  {
    const InterpolationSets sets = sample_interpolation_sets(2, {0}, 2, 42);
    CHECK(sets.x1 == IndexList{1});
    CHECK(sets.x2 == IndexList{0});
  }
  {
    // Odd K splits ceil to V\Z and floor to Z.
    const InterpolationSets sets = sample_interpolation_sets(10, {0, 1, 2, 3}, 3, 7);
    CHECK(sets.x1.size() == 2);
    CHECK(sets.x2.size() == 1);
  }
  {
    const InterpolationSets a = sample_interpolation_sets(30, {0, 1, 2, 3, 4}, 8, 11);
    const InterpolationSets b = sample_interpolation_sets(30, {0, 1, 2, 3, 4}, 8, 11);
    CHECK(a.x1 == b.x1);
    CHECK(a.x2 == b.x2);
  }
  CHECK_THROWS_WITH_AS(sample_interpolation_sets(4, {0, 1, 2}, 4, 1),
                       doctest::Contains("V\\Z"), InputError);
  CHECK_THROWS_WITH_AS(sample_interpolation_sets(40, {0}, 8, 1),
                       doctest::Contains("Z"), InputError);
}

TEST_CASE("nystrom_qr is exact at full rank") {
  SplitMix64 rng(5);
  const Index n = 6;
  const Matrix w = random_connected_weights(n, 0.9, rng);
  const Matrix lap_s = dense_laplacian(w, Normalization::symmetric);
  const IndexList z{0, 1, 2};
  const LowRankLaplacian lr =
      nystrom_qr(matrix_weight(w), n, full_sets(n, z), Normalization::symmetric);
  const Matrix recon = lr.us * lr.lambda.asDiagonal() * lr.us.transpose();
  CHECK((recon - lap_s).norm() <= 1e-8);
  CHECK(relative_frobenius_error(lr, lap_s) <= 1e-8);
}

TEST_CASE("nystrom_qr factor invariants") {
  SplitMix64 rng(10);
  const Index n = 40;
  const Matrix w = kernel_weights(n, 0.5, rng);
  IndexList z;
  for (Index i = 0; i < 12; ++i) z.push_back(i);
  const LowRankLaplacian lr =
      nystrom_qr(matrix_weight(w), n, z, 10, 123, Normalization::random_walk);
  CHECK(lr.rank == 10);
  CHECK((lr.us.transpose() * lr.us - Matrix::Identity(10, 10)).norm() <= 1e-10);
  CHECK((lr.u2.transpose() * lr.u1 - Matrix::Identity(10, 10)).norm() <= 1e-10);
  CHECK(lr.d_hat.minCoeff() > 0.0);
  CHECK(lr.lambda.allFinite());
  // U1 L U2^T is the d-hat-scaled conjugation of Us L Us^T.
  const Matrix left = lr.u1 * lr.lambda.asDiagonal() * lr.u2.transpose();
  const Matrix right = lr.d_hat.array().rsqrt().matrix().asDiagonal() *
                       (lr.us * lr.lambda.asDiagonal() * lr.us.transpose()) *
                       lr.d_hat.array().sqrt().matrix().asDiagonal();
  CHECK((left - right).norm() <= 1e-12 * (1.0 + right.norm()));

  // Determinism per seed.
  const LowRankLaplacian again =
      nystrom_qr(matrix_weight(w), n, z, 10, 123, Normalization::random_walk);
  CHECK((lr.us - again.us).cwiseAbs().maxCoeff() == 0.0);
  CHECK((lr.lambda - again.lambda).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("nystrom error paths") {
  // Hand-built graph with a negative Nystrom degree estimate: X = {0,1,2} a
  // unit triangle, vertex 3 attached only to vertex 0 with weight 10. Then
  // x = w_XX^{-1}(w_VX^T 1) = (-4, 6, 6) and d_hat(3) = -40.
  Matrix w = Matrix::Zero(4, 4);
  w(0, 1) = w(1, 0) = 1;
  w(0, 2) = w(2, 0) = 1;
  w(1, 2) = w(2, 1) = 1;
  w(0, 3) = w(3, 0) = 10;
  InterpolationSets sets;
  sets.x1 = {};
  sets.x2 = {0, 1, 2};
  CHECK_THROWS_WITH_AS(
      nystrom_qr(matrix_weight(w), 4, sets, Normalization::symmetric),
      doctest::Contains("degree estimate"), NumericError);

  // Singular w_XX: two interpolation vertices with identical weight rows.
  Matrix dup = Matrix::Zero(4, 4);
  dup(0, 2) = dup(2, 0) = 1;
  dup(1, 2) = dup(2, 1) = 1;
  dup(0, 3) = dup(3, 0) = 0.5;
  dup(1, 3) = dup(3, 1) = 0.5;
  dup(2, 3) = dup(3, 2) = 0.25;
  InterpolationSets dup_sets;
  dup_sets.x1 = {0, 1};
  dup_sets.x2 = {};
  CHECK_THROWS_WITH_AS(
      nystrom_qr(matrix_weight(dup), 4, dup_sets, Normalization::symmetric),
      doctest::Contains("singular"), NumericError);
}

TEST_CASE("classic nystrom matches qr at full rank and is deterministic") {
  SplitMix64 rng(21);
  const Index n = 8;
  const Matrix w = random_connected_weights(n, 0.9, rng);
  const Matrix lap_s = dense_laplacian(w, Normalization::symmetric);
  const IndexList z{0, 1, 2, 3};
  ClassicStats stats;
  const LowRankLaplacian classic = nystrom_classic(
      matrix_weight(w), n, full_sets(n, z), Normalization::symmetric, &stats);
  const LowRankLaplacian qr =
      nystrom_qr(matrix_weight(w), n, full_sets(n, z), Normalization::symmetric);
  // Full rank: both reconstruct Delta_s, so the subspaces coincide.
  const Matrix recon = classic.us * classic.lambda.asDiagonal() * classic.us.transpose();
  CHECK((recon - lap_s).norm() <= 1e-6);
  CHECK(relative_frobenius_error(classic, lap_s) <=
        relative_frobenius_error(qr, lap_s) + 1e-6);
  // The square root of the indefinite w_XX block always goes complex.
  CHECK(stats.complex_discards >= 1);

  const LowRankLaplacian c2 = nystrom_classic(matrix_weight(w), n, full_sets(n, z),
                                              Normalization::symmetric);
  CHECK((classic.us - c2.us).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("truncated SVD baseline") {
  SplitMix64 rng(31);
  const Index n = 7;
  const Matrix w = random_connected_weights(n, 0.8, rng);
  const Matrix lap_s = dense_laplacian(w, Normalization::symmetric);
  const Vector d = w.rowwise().sum();

  const LowRankLaplacian full =
      truncated_svd_baseline(lap_s, n, d, Normalization::symmetric);
  CHECK(relative_frobenius_error(full, lap_s) <= 1e-12);

  // Eckart-Young: error is the Frobenius norm of the dropped singular values.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(lap_s);
  Vector abs_eigs = eig.eigenvalues().cwiseAbs();
  std::sort(abs_eigs.data(), abs_eigs.data() + n, std::greater<double>());
  for (Index k : {Index(2), Index(4), Index(n - 1)}) {
    const LowRankLaplacian lr =
        truncated_svd_baseline(lap_s, k, d, Normalization::symmetric);
    double dropped2 = 0.0;
    for (Index i = k; i < n; ++i) dropped2 += abs_eigs(i) * abs_eigs(i);
    CHECK(relative_frobenius_error(lr, lap_s) ==
          doctest::Approx(std::sqrt(dropped2) / lap_s.norm()).epsilon(1e-9));
  }
  CHECK_THROWS_AS(truncated_svd_baseline(lap_s, n + 1, d, Normalization::symmetric),
                  InputError);

  // 2-node unit graph: eigenvalues {0, 2}; the rank-1 truncation keeps the 2.
  Matrix w2(2, 2);
  w2 << 0, 1, 1, 0;
  const Matrix lap2 = dense_laplacian(w2, Normalization::symmetric);
  const LowRankLaplacian lr1 =
      truncated_svd_baseline(lap2, 1, w2.rowwise().sum(), Normalization::symmetric);
  CHECK(relative_frobenius_error(lr1, lap2) <= 1e-14);
}

TEST_CASE("relative frobenius error endpoints") {
  Matrix w2(2, 2);
  w2 << 0, 1, 1, 0;
  const Matrix lap2 = dense_laplacian(w2, Normalization::symmetric);
  LowRankLaplacian zero;
  zero.rank = 1;
  zero.lambda = Vector::Zero(1);
  zero.us = Matrix::Zero(2, 1);
  zero.us(0, 0) = 1.0;
  zero.d_hat = Vector::Ones(2);
  zero.u1 = zero.us;
  zero.u2 = zero.us;
  CHECK(relative_frobenius_error(zero, lap2) == doctest::Approx(1.0));
}

TEST_SUITE_END();
