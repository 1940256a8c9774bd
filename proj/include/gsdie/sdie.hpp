#pragma once

#include "gsdie/expsolver.hpp"
#include "gsdie/graph.hpp"
#include "gsdie/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace gsdie {

// The fidelity-forced diffusion as an affine map S u = expm(u) + b, with the
// linear part and the forcing exposed separately (the Lyapunov functional
// needs both). Backed either by the low-rank fast path or by the dense
// oracle.
struct DiffusionMap {
  std::function<Vector(const Vector&)> expm;  // u -> e^{-tau A} u (approximate)
  Vector b;
  Vector apply(const Vector& u) const { return expm(u) + b; }
};

// Fast-path diffusion from the low-rank factors. b is computed once here and
// reused across all iterations. For the euler scheme the affine split is
// recovered from the iteration itself: b is the forced iteration started at
// zero and expm the iteration with the forcing removed. The map holds
// references to lap and fid, which must outlive it.
DiffusionMap make_diffusion(const PropagatorConfig& cfg, const LowRankLaplacian& lap,
                            const FidelityData& fid);

struct SdieParams {
  double eps = 0.003;
  double tau = 0.003;
  double delta = 1e-10;  // termination threshold on |u_n - u_{n-1}|_2^2 / |u_n|_2^2
  int max_iter = 1000;

  double lambda() const { return tau / eps; }
  void validate() const;  // requires tau > 0 and lambda in (0, 1]
};

struct UpdateResult {
  Vector u;
  Vector beta;
};

// Piecewise-linear relaxed threshold, the unique minimiser of
//   lambda <u, 1-u>_V + |u - v|_V^2  over u in [0,1]^n,  0 < lambda < 1:
//   u_i = 0                       if v_i < lambda/2
//   u_i = 1/2 + (v_i-1/2)/(1-lambda)   if lambda/2 <= v_i < 1 - lambda/2
//   u_i = 1                       if v_i >= 1 - lambda/2
// with beta = ((1-lambda) u - v + (lambda/2) 1) / lambda, which lies in B(u).
UpdateResult sdie_update(const Vector& v, double lambda);

// Hard threshold at 1/2 (ties to 1) with beta = 1/2 - v; the lambda = 1 case.
UpdateResult mbo_update(const Vector& v);

// Lyapunov functional H(u) = J(u) + (lambda - 1) <u, 1-u>_V with
// J(u) = <u, 1 - 2b - e^{-tau A} u>_V. Exact monotonicity holds when the
// DiffusionMap is the dense-exact propagator; with approximate propagators
// this is a diagnostic. The inner product uses d^r (d-hat when degrees are
// estimated).
double lyapunov_H(const Vector& u, double lambda, const DiffusionMap& diffusion,
                  const Vector& v_weights);

struct TraceEntry {
  int iter = 0;
  double h = 0.0;  // only populated when record_h
  double step_norm = 0.0;
  double seconds = 0.0;
};

struct SdieOptions {
  bool record_trace = false;
  bool record_h = false;             // implies an extra propagation per iteration
  Vector v_weights;                  // required when record_h
  std::vector<UpdateResult>* history = nullptr;  // per-iteration (u, beta), optional
};

// Final label state of a run.
struct LabelState {
  Vector u;
  Vector beta;
  int iterations = 0;
  bool converged = false;  // false means max_iter was hit (a warning, not a failure)
  std::optional<double> h;
  std::vector<TraceEntry> trace;
};

// Algorithm main loop: v = S_tau u_n, then the SDIE update (MBO when
// lambda = 1), until |u_n - u_{n-1}|_2^2 / |u_n|_2^2 < delta (plain Euclidean
// norms). At least one update is always performed; a zero denominator counts
// as converged only when the step itself is zero.
LabelState run_sdie(const Vector& u0, const SdieParams& params,
                    const DiffusionMap& diffusion, const SdieOptions& options = {});

// Convenience overload wiring the fast path.
LabelState run_sdie(const Vector& u0, const SdieParams& params,
                    const PropagatorConfig& cfg, const LowRankLaplacian& lap,
                    const FidelityData& fid, const SdieOptions& options = {});

}  // namespace gsdie
