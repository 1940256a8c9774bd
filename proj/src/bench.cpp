#include "gsdie/bench.hpp"

#include "gsdie/errors.hpp"
#include "gsdie/oracle.hpp"
#include "gsdie/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace gsdie {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SlopeFit fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& err,
                          double floor) {
  SlopeFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (err[i] <= floor) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(err[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++fit.points;
  }
  if (fit.points >= 2)
    fit.slope = (fit.points * sxy - sx * sy) / (fit.points * sxx - sx * sx);
  return fit;
}

BenchGraph bench_graph_from_image(const ImageTensor& img, double sigma,
                                  PixelScale scale) {
  BenchGraph bg;
  bg.n = img.pixels();
  auto features = std::make_shared<FeatureMatrix>(extract_features(img, scale));
  bg.features = features;
  const double denom = static_cast<double>(features->ell) * sigma * sigma;
  bg.weight = [features, denom](Index i, Index j) -> double {
    if (i == j) return 0.0;
    const double d2 = (features->z.row(i) - features->z.row(j)).squaredNorm();
    return std::exp(-d2 / denom);
  };
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width / 2; ++c)
      bg.z.push_back(static_cast<Index>(r) * img.width + c);
  return bg;
}

Matrix materialize_delta_s(const WeightFn& weight, Index n, Vector* degrees) {
  Matrix w(n, n);
  for (Index i = 0; i < n; ++i) {
    w(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) w(i, j) = w(j, i) = weight(i, j);
  }
  if (degrees != nullptr) *degrees = w.rowwise().sum();
  return dense_laplacian(w, Normalization::symmetric);
}

std::vector<double> truncated_svd_errors(const Matrix& delta_s,
                                         const std::vector<Index>& ranks) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(delta_s, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw NumericError("truncated_svd_errors: eigendecomposition failed");
  Vector abs_eigs = eig.eigenvalues().cwiseAbs();
  std::sort(abs_eigs.data(), abs_eigs.data() + abs_eigs.size(), std::greater<double>());
  const double total2 = abs_eigs.squaredNorm();
  std::vector<double> out;
  out.reserve(ranks.size());
  for (Index k : ranks) {
    double dropped2 = 0.0;
    for (Index i = k; i < abs_eigs.size(); ++i) dropped2 += abs_eigs(i) * abs_eigs(i);
    out.push_back(std::sqrt(std::max(0.0, dropped2) / total2));
  }
  return out;
}

namespace {

// |c T L T^T c^T - Delta_s|_F^2 with the heavy product g = Delta_s * c shared
// between callers. Exact when the factors satisfy U = c * T; for the QR
// variant that identity holds up to rounding of the Householder Q.
double residual_error(const Matrix& ctc, const Matrix& ctg, const Matrix& transform,
                      const Vector& lambda, double delta_s_fro2) {
  const Matrix m = transform.transpose() * ctg * transform;   // U^T Delta_s U
  const Matrix gram = transform.transpose() * ctc * transform;  // U^T U
  const double cross = (lambda.asDiagonal() * m).trace();
  const Matrix lg = lambda.asDiagonal() * gram;
  const double quad = (lg * lg).trace();
  const double err2 = std::max(0.0, delta_s_fro2 - 2.0 * cross + quad);
  return std::sqrt(err2 / delta_s_fro2);
}

}  // namespace

PairedNystromError bench_nystrom_pair(const BenchGraph& bg, const Matrix& delta_s,
                                      double delta_s_fro2, Index rank,
                                      std::uint64_t seed) {
  const InterpolationSets sets = sample_interpolation_sets(bg.n, bg.z, rank, seed);
  PairedNystromError out;

  // Blocks are shared; each method's reported time is what a standalone run
  // would cost (block construction plus its own core).
  auto t0 = std::chrono::steady_clock::now();
  const NystromBlocks blocks = build_nystrom_blocks(bg.weight, bg.n, sets.joined());
  const double block_seconds = seconds_since(t0);

  NystromDetails qr_details;
  t0 = std::chrono::steady_clock::now();
  const LowRankLaplacian qr =
      nystrom_qr_from_blocks(blocks, Normalization::symmetric, &qr_details);
  out.qr_seconds = block_seconds + seconds_since(t0);

  NystromDetails classic_details;
  t0 = std::chrono::steady_clock::now();
  const LowRankLaplacian classic = nystrom_classic_from_blocks(
      blocks, Normalization::symmetric, &out.classic_stats, &classic_details);
  out.classic_seconds = block_seconds + seconds_since(t0);

  // Shared dense product; both factor sets live in the column space of the
  // same scaled block.
  const Matrix g = delta_s.selfadjointView<Eigen::Lower>() * blocks.c;
  const Matrix ctg = blocks.c.transpose() * g;
  const Matrix ctc = blocks.c.transpose() * blocks.c;
  out.qr_error =
      residual_error(ctc, ctg, qr_details.transform, qr.lambda, delta_s_fro2);
  out.classic_error = residual_error(ctc, ctg, classic_details.transform,
                                     classic.lambda, delta_s_fro2);
  return out;
}

namespace {

struct ExpmInstance {
  Graph graph;
  FidelityData fid;
  DenseOperator op;
  Vector u;

  static ExpmInstance make(Index n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Matrix w = random_connected_weights(n, 0.5, rng);
    Vector mu = Vector::Zero(n);
    Vector f_tilde = Vector::Zero(n);
    for (Index i = 0; i < n / 2; ++i) {
      mu(i) = 1.0;
      f_tilde(i) = rng.uniform01();
    }
    Graph g = Graph::dense(std::move(w), Normalization::random_walk);
    FidelityData fid = FidelityData::make(std::move(mu), std::move(f_tilde));
    DenseOperator op(g, fid);
    Vector u(n);
    for (Index i = 0; i < n; ++i) u(i) = rng.uniform01();
    return {std::move(g), std::move(fid), std::move(op), std::move(u)};
  }
};

}  // namespace

ExpmBenchResult bench_expm(Index n, double tau, const std::vector<int>& substeps,
                           bool full_rank, std::uint64_t seed) {
  ExpmInstance inst = ExpmInstance::make(n, seed);
  const Index rank =
      full_rank ? n : static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(n))));
  const Matrix delta_s =
      dense_laplacian(*inst.graph.dense_weights(), Normalization::symmetric);
  const LowRankLaplacian lap = truncated_svd_baseline(
      delta_s, rank, inst.graph.degrees(), Normalization::random_walk);

  const Vector expm_ref = inst.op.expm_apply(tau, inst.u);
  const Vector full_ref = inst.op.exact_S_tau(inst.u, tau);

  ExpmBenchResult result;
  std::vector<double> inv_k;
  std::vector<double> errs[3];
  for (int k : substeps) {
    inv_k.push_back(1.0 / k);
    for (ExpScheme scheme :
         {ExpScheme::euler, ExpScheme::strang, ExpScheme::yoshida}) {
      PropagatorConfig cfg;
      cfg.scheme = scheme;
      cfg.k = k;
      cfg.tau = tau;
      const auto t0 = std::chrono::steady_clock::now();
      const Vector got = propagate(inst.u, cfg, lap, inst.fid);
      const double secs = seconds_since(t0);
      const Vector& ref = scheme == ExpScheme::euler ? full_ref : expm_ref;
      const double err = (got - ref).norm() / ref.norm();
      result.rows.push_back({to_string(scheme), k, rank, err, secs});
      errs[static_cast<int>(scheme)].push_back(err);
    }
  }
  result.slope_strang =
      fit_loglog_slope(inv_k, errs[static_cast<int>(ExpScheme::strang)]).slope;
  result.slope_yoshida =
      fit_loglog_slope(inv_k, errs[static_cast<int>(ExpScheme::yoshida)]).slope;
  result.slope_euler =
      fit_loglog_slope(inv_k, errs[static_cast<int>(ExpScheme::euler)]).slope;
  return result;
}

std::vector<BBenchRow> bench_b(Index n, const std::vector<double>& taus,
                               const std::vector<Index>& ranks, int k_b, int simpson_m,
                               std::uint64_t seed) {
  ExpmInstance inst = ExpmInstance::make(n, seed);
  const Matrix delta_s =
      dense_laplacian(*inst.graph.dense_weights(), Normalization::symmetric);
  std::vector<BBenchRow> rows;
  for (Index rank_arg : ranks) {
    const Index rank = rank_arg == 0 ? n : rank_arg;
    const LowRankLaplacian lap = truncated_svd_baseline(
        delta_s, rank, inst.graph.degrees(), Normalization::random_walk);
    for (double tau : taus) {
      const Vector exact = inst.op.exact_b(tau);
      const double exact_norm = exact.norm();
      for (BMethod method :
           {BMethod::trapezium, BMethod::midpoint, BMethod::simpson,
            BMethod::composite_simpson, BMethod::ode_euler, BMethod::woodbury}) {
        PropagatorConfig cfg;
        // Fourth-order exponentials for the methods whose own error would
        // otherwise be hidden behind the Strang error in g.
        cfg.scheme = (method == BMethod::composite_simpson ||
                      method == BMethod::woodbury)
                         ? ExpScheme::yoshida
                         : ExpScheme::strang;
        cfg.tau = tau;
        cfg.k_b = k_b;
        cfg.simpson_m = simpson_m;
        cfg.b_method = method;
        const Vector got = compute_b(cfg, lap, inst.fid);
        const int param = method == BMethod::composite_simpson ? simpson_m : k_b;
        rows.push_back({to_string(method), param, rank, tau,
                        (got - exact).norm() / exact_norm});
      }
    }
  }
  return rows;
}

}  // namespace gsdie
