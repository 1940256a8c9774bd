#include "gsdie/lowrank.hpp"

#include "gsdie/errors.hpp"
#include "gsdie/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>

namespace gsdie {

namespace {

constexpr double kRcondThreshold = 1e-12;

Matrix gather_columns(const WeightFn& weight, Index n, const IndexList& x) {
  Matrix w_vx(n, static_cast<Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j)
    for (Index i = 0; i < n; ++i) w_vx(i, static_cast<Index>(j)) = weight(i, x[j]);
  return w_vx;
}

Eigen::FullPivLU<Matrix> factor_w_xx(const Matrix& w_xx) {
  Eigen::FullPivLU<Matrix> lu(w_xx);
  if (!(lu.rcond() > kRcondThreshold))
    throw NumericError(
        "nystrom: interpolation kernel block w_XX is numerically singular "
        "(reciprocal condition estimate below 1e-12); a larger sigma or a "
        "different seed may help");
  return lu;
}

LowRankLaplacian assemble(Vector lambda, Matrix us, Vector d_hat,
                          Normalization normalization) {
  LowRankLaplacian lap;
  lap.rank = us.cols();
  lap.lambda = std::move(lambda);
  lap.us = std::move(us);
  lap.d_hat = std::move(d_hat);
  lap.normalization = normalization;
  if (normalization == Normalization::symmetric) {
    lap.u1 = lap.us;
    lap.u2 = lap.us;
  } else {
    lap.u1 = lap.d_hat.array().rsqrt().matrix().asDiagonal() * lap.us;
    lap.u2 = lap.d_hat.array().sqrt().matrix().asDiagonal() * lap.us;
  }
  return lap;
}

}  // namespace

IndexList InterpolationSets::joined() const {
  IndexList x = x1;
  x.insert(x.end(), x2.begin(), x2.end());
  std::sort(x.begin(), x.end());
  return x;
}

InterpolationSets sample_interpolation_sets(Index n, const IndexList& z, Index rank,
                                            std::uint64_t seed) {
  if (rank < 2 || rank > n) throw InputError("sample_interpolation_sets: need 2 <= K <= n");
  const std::size_t want_z = static_cast<std::size_t>(rank / 2);            // floor(K/2)
  const std::size_t want_rest = static_cast<std::size_t>(rank) - want_z;    // ceil(K/2)
  std::vector<char> in_z(static_cast<std::size_t>(n), 0);
  for (Index i : z) {
    if (i < 0 || i >= n) throw InputError("sample_interpolation_sets: index out of range");
    in_z[static_cast<std::size_t>(i)] = 1;
  }
  IndexList rest;
  rest.reserve(static_cast<std::size_t>(n) - z.size());
  for (Index i = 0; i < n; ++i)
    if (!in_z[static_cast<std::size_t>(i)]) rest.push_back(i);
  if (z.size() < want_z)
    throw InputError("sample_interpolation_sets: reference pool Z smaller than floor(K/2)");
  if (rest.size() < want_rest)
    throw InputError("sample_interpolation_sets: pool V\\Z smaller than ceil(K/2)");
  SplitMix64 rng(seed);
  InterpolationSets sets;
  sets.seed = seed;
  sets.x1 = sample_without_replacement(rng, rest, want_rest);
  sets.x2 = sample_without_replacement(rng, z, want_z);
  return sets;
}

NystromBlocks build_nystrom_blocks(const WeightFn& weight, Index n,
                                   const IndexList& x) {
  NystromBlocks b;
  b.x = x;
  const Index k = static_cast<Index>(x.size());
  Matrix w_vx = gather_columns(weight, n, x);
  b.w_xx.resize(k, k);
  for (Index j = 0; j < k; ++j)
    b.w_xx.col(j) = w_vx.row(x[static_cast<std::size_t>(j)]).transpose();
  const Eigen::FullPivLU<Matrix> lu = factor_w_xx(b.w_xx);
  // d_hat = w_VX (w_XX^{-1} (w_VX^T 1))
  b.d_hat.noalias() = w_vx * lu.solve(w_vx.transpose() * Vector::Ones(n));
  if ((b.d_hat.array() <= 0.0).any())
    throw NumericError(
        "nystrom: degree estimate has nonpositive entries; increase the rank K "
        "or the kernel scale sigma");
  b.c = b.d_hat.array().rsqrt().matrix().asDiagonal() * w_vx;
  b.dx.resize(k);
  for (Index j = 0; j < k; ++j) b.dx(j) = b.d_hat(x[static_cast<std::size_t>(j)]);
  return b;
}

LowRankLaplacian nystrom_qr(const WeightFn& weight, Index n, const IndexList& z,
                            Index rank, std::uint64_t seed,
                            Normalization normalization, NystromDetails* details) {
  return nystrom_qr(weight, n, sample_interpolation_sets(n, z, rank, seed),
                    normalization, details);
}

LowRankLaplacian nystrom_qr(const WeightFn& weight, Index n,
                            const InterpolationSets& sets,
                            Normalization normalization, NystromDetails* details) {
  return nystrom_qr_from_blocks(build_nystrom_blocks(weight, n, sets.joined()),
                                normalization, details);
}

LowRankLaplacian nystrom_qr_from_blocks(const NystromBlocks& blocks,
                                        Normalization normalization,
                                        NystromDetails* details) {
  const Index n = blocks.c.rows();
  const Index k = blocks.c.cols();
  const Eigen::FullPivLU<Matrix> lu = factor_w_xx(blocks.w_xx);

  Eigen::HouseholderQR<Matrix> qr(blocks.c);
  const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);

  Matrix s = r * lu.solve(r.transpose());
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  if (eig.info() != Eigen::Success)
    throw NumericError("nystrom_qr: eigendecomposition failed");

  const Vector lambda = Vector::Ones(k) - eig.eigenvalues();
  Matrix us = q * eig.eigenvectors();
  if (details != nullptr) {
    details->x = blocks.x;
    details->transform =
        r.triangularView<Eigen::Upper>().solve(eig.eigenvectors());
    details->c = blocks.c;
  }
  return assemble(lambda, std::move(us), blocks.d_hat, normalization);
}

LowRankLaplacian nystrom_classic(const WeightFn& weight, Index n, const IndexList& z,
                                 Index rank, std::uint64_t seed,
                                 Normalization normalization, ClassicStats* stats,
                                 NystromDetails* details) {
  return nystrom_classic(weight, n, sample_interpolation_sets(n, z, rank, seed),
                         normalization, stats, details);
}

// One-shot orthogonalisation: with A the X-block of the normalised kernel and
// C its normalised column block, diagonalise A^{-1/2} (C^T C) A^{-1/2} and map
// the eigenvectors back through C A^{-1/2} Phi Sigma^{-1/2}. A is indefinite,
// so A^{1/2} is complex; the computation runs in complex arithmetic and the
// imaginary parts are discarded at the end.
LowRankLaplacian nystrom_classic(const WeightFn& weight, Index n,
                                 const InterpolationSets& sets,
                                 Normalization normalization, ClassicStats* stats,
                                 NystromDetails* details) {
  return nystrom_classic_from_blocks(build_nystrom_blocks(weight, n, sets.joined()),
                                     normalization, stats, details);
}

LowRankLaplacian nystrom_classic_from_blocks(const NystromBlocks& blocks,
                                             Normalization normalization,
                                             ClassicStats* stats,
                                             NystromDetails* details) {
  using CMatrix = Eigen::MatrixXcd;
  using CVector = Eigen::VectorXcd;
  const Index n = blocks.c.rows();
  const Index k = blocks.c.cols();

  // Two-sided normalised X-block.
  const Vector dx_rsqrt = blocks.dx.array().rsqrt();
  Matrix a = dx_rsqrt.asDiagonal() * blocks.w_xx * dx_rsqrt.asDiagonal();
  a = 0.5 * (a + a.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig_a(a);
  if (eig_a.info() != Eigen::Success)
    throw NumericError("nystrom_classic: eigendecomposition of w_XX failed");
  CVector inv_sqrt_eigs(k);
  for (Index i = 0; i < k; ++i) {
    const std::complex<double> root = std::sqrt(std::complex<double>(eig_a.eigenvalues()(i), 0.0));
    inv_sqrt_eigs(i) = 1.0 / root;
  }
  const CMatrix a_inv_sqrt = eig_a.eigenvectors().cast<std::complex<double>>() *
                             inv_sqrt_eigs.asDiagonal() *
                             eig_a.eigenvectors().transpose().cast<std::complex<double>>();

  // Column block with two-sided scaling: c2 = c * diag(dx^{-1/2}).
  const Matrix c2 = blocks.c * dx_rsqrt.asDiagonal();
  const Matrix gram = c2.transpose() * c2;
  const CMatrix s = a_inv_sqrt * gram.cast<std::complex<double>>() * a_inv_sqrt;

  Eigen::ComplexEigenSolver<CMatrix> eig_s(s);
  if (eig_s.info() != Eigen::Success)
    throw NumericError("nystrom_classic: eigendecomposition failed");
  CVector sigma = eig_s.eigenvalues();
  CMatrix phi = eig_s.eigenvectors();

  // Sort by real part ascending to match the self-adjoint ordering.
  std::vector<Index> order(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Index p, Index q) { return sigma(p).real() < sigma(q).real(); });

  ClassicStats local;
  CMatrix t(k, k);
  CVector sigma_sorted(k);
  for (Index col = 0; col < k; ++col) {
    const Index src = order[static_cast<std::size_t>(col)];
    std::complex<double> sv = sigma(src);
    if (!std::isfinite(sv.real()) || !std::isfinite(sv.imag())) {
      ++local.nonfinite_eigs;
      sv = 0.0;
    }
    sigma_sorted(col) = sv;
    const std::complex<double> rsqrt =
        sv == std::complex<double>(0.0, 0.0) ? std::complex<double>(0.0, 0.0)
                                             : 1.0 / std::sqrt(sv);
    t.col(col) = rsqrt * phi.col(src);
  }
  const CMatrix transform_c = dx_rsqrt.cast<std::complex<double>>().asDiagonal() *
                              (a_inv_sqrt * t);
  const CMatrix v = blocks.c.cast<std::complex<double>>() * transform_c;

  const double im_v = v.imag().cwiseAbs().maxCoeff();
  const double im_s = sigma_sorted.imag().cwiseAbs().maxCoeff();
  local.max_imag = std::max(im_v, im_s);
  if (local.max_imag > 0.0) ++local.complex_discards;

  Vector lambda = Vector::Ones(k) - sigma_sorted.real();
  for (Index i = 0; i < k; ++i) {
    if (!std::isfinite(lambda(i))) {
      ++local.nonfinite_eigs;
      lambda(i) = 0.0;
    }
  }
  Matrix us = v.real();
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < n; ++i)
      if (!std::isfinite(us(i, j))) {
        ++local.nonfinite_eigs;
        us(i, j) = 0.0;
      }
  if (stats != nullptr) *stats = local;
  if (details != nullptr) {
    details->x = blocks.x;
    details->transform = transform_c.real();
    details->c = blocks.c;
  }
  return assemble(std::move(lambda), std::move(us), blocks.d_hat, normalization);
}

LowRankLaplacian truncated_svd_baseline(const Matrix& delta_s, Index rank,
                                        const Vector& degrees,
                                        Normalization normalization) {
  const Index n = delta_s.rows();
  if (rank < 1 || rank > n) throw InputError("truncated_svd_baseline: need 1 <= K <= n");
  if (degrees.size() != n) throw InputError("truncated_svd_baseline: degree vector length mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(delta_s);
  if (eig.info() != Eigen::Success)
    throw NumericError("truncated_svd_baseline: eigendecomposition failed");
  // Delta_s is symmetric PSD, so the leading singular triplets are the
  // largest-eigenvalue pairs; order by |eigenvalue| regardless.
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Index p, Index q) {
    return std::abs(eig.eigenvalues()(p)) > std::abs(eig.eigenvalues()(q));
  });
  Vector lambda(rank);
  Matrix us(n, rank);
  for (Index j = 0; j < rank; ++j) {
    lambda(j) = eig.eigenvalues()(order[static_cast<std::size_t>(j)]);
    us.col(j) = eig.eigenvectors().col(order[static_cast<std::size_t>(j)]);
  }
  return assemble(std::move(lambda), std::move(us), degrees, normalization);
}

double relative_frobenius_error(const LowRankLaplacian& approx, const Matrix& delta_s) {
  if (approx.size() != delta_s.rows() || delta_s.rows() != delta_s.cols())
    throw InputError("relative_frobenius_error: dimension mismatch");
  const double denom2 = delta_s.squaredNorm();
  // |U L U^T - D|_F^2 = |D|_F^2 - 2 tr(L U^T D U) + tr((L U^T U)^2),
  // avoiding the n x n residual.
  const Matrix du = delta_s.selfadjointView<Eigen::Lower>() * approx.us;
  const Matrix m = approx.us.transpose() * du;
  const Matrix g = approx.us.transpose() * approx.us;
  const double cross = (approx.lambda.asDiagonal() * m).trace();
  const Matrix lg = approx.lambda.asDiagonal() * g;
  const double quad = (lg * lg).trace();
  const double err2 = std::max(0.0, denom2 - 2.0 * cross + quad);
  return std::sqrt(err2 / denom2);
}

}  // namespace gsdie
