#include "gsdie/sdie.hpp"

#include "gsdie/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace gsdie {

DiffusionMap make_diffusion(const PropagatorConfig& cfg, const LowRankLaplacian& lap,
                            const FidelityData& fid) {
  cfg.validate();
  DiffusionMap map;
  if (cfg.scheme == ExpScheme::euler) {
    map.b = propagate(Vector::Zero(lap.size()), cfg, lap, fid);
    FidelityData hom = fid;  // forcing removed, damping 1 - dt*mu kept
    hom.f_tilde.setZero();
    hom.f.setZero();
    map.expm = [cfg, &lap, hom = std::move(hom)](const Vector& u) {
      return propagate(u, cfg, lap, hom);
    };
  } else {
    map.b = compute_b(cfg, lap, fid);
    map.expm = [cfg, &lap, &fid](const Vector& u) {
      return propagate(u, cfg, lap, fid);
    };
  }
  return map;
}

void SdieParams::validate() const {
  if (eps <= 0.0) throw InputError("SdieParams: eps must be positive");
  if (tau <= 0.0) throw InputError("SdieParams: tau must be positive");
  const double l = lambda();
  if (l > 1.0)
    throw InputError("SdieParams: lambda = tau/eps must lie in (0,1]; the "
                     "tau > eps regime has non-unique updates");
  if (delta <= 0.0) throw InputError("SdieParams: delta must be positive");
  if (max_iter < 1) throw InputError("SdieParams: max_iter must be >= 1");
}

UpdateResult sdie_update(const Vector& v, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw InputError("sdie_update: lambda must lie in (0,1); use mbo_update for lambda = 1");
  const Index n = v.size();
  UpdateResult out;
  out.u.resize(n);
  const double lo = 0.5 * lambda;
  const double hi = 1.0 - 0.5 * lambda;
  for (Index i = 0; i < n; ++i) {
    if (v(i) < lo) {
      out.u(i) = 0.0;
    } else if (v(i) >= hi) {
      out.u(i) = 1.0;
    } else {
      // Clamp guards the [0,1] invariant against rounding at the kinks.
      out.u(i) = std::clamp(0.5 + (v(i) - 0.5) / (1.0 - lambda), 0.0, 1.0);
    }
  }
  out.beta = ((1.0 - lambda) * out.u - v + Vector::Constant(n, 0.5 * lambda)) / lambda;
  return out;
}

UpdateResult mbo_update(const Vector& v) {
  UpdateResult out;
  out.u = (v.array() >= 0.5).cast<double>();
  out.beta = Vector::Constant(v.size(), 0.5) - v;
  return out;
}

double lyapunov_H(const Vector& u, double lambda, const DiffusionMap& diffusion,
                  const Vector& v_weights) {
  if (u.size() != v_weights.size()) throw InputError("lyapunov_H: dimension mismatch");
  const Vector inner = Vector::Ones(u.size()) - 2.0 * diffusion.b - diffusion.expm(u);
  const double j = (u.array() * inner.array() * v_weights.array()).sum();
  const double interface = (u.array() * (1.0 - u.array()) * v_weights.array()).sum();
  return j + (lambda - 1.0) * interface;
}

LabelState run_sdie(const Vector& u0, const SdieParams& params,
                    const DiffusionMap& diffusion, const SdieOptions& options) {
  params.validate();
  if ((u0.array() < 0.0).any() || (u0.array() > 1.0).any())
    throw InputError("run_sdie: initial state must lie in [0,1]");
  if (options.record_h && options.v_weights.size() != u0.size())
    throw InputError("run_sdie: record_h requires v_weights");
  const double lambda = params.lambda();
  const bool mbo = lambda >= 1.0;

  LabelState state;
  state.u = u0;
  const auto start = std::chrono::steady_clock::now();
  for (int iter = 1; iter <= params.max_iter; ++iter) {
    const Vector v = diffusion.apply(state.u);
    UpdateResult next = mbo ? mbo_update(v) : sdie_update(v, lambda);
    const double step2 = (next.u - state.u).squaredNorm();
    const double denom2 = next.u.squaredNorm();
    state.u = std::move(next.u);
    state.beta = std::move(next.beta);
    state.iterations = iter;
    if (options.history != nullptr)
      options.history->push_back({state.u, state.beta});
    if (options.record_trace) {
      TraceEntry entry;
      entry.iter = iter;
      entry.step_norm = std::sqrt(step2);
      entry.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (options.record_h)
        entry.h = lyapunov_H(state.u, lambda, diffusion, options.v_weights);
      state.trace.push_back(entry);
    }
    // Division guard: an all-zero iterate counts as converged only if the
    // step itself was zero.
    const bool stop = denom2 > 0.0 ? (step2 / denom2 < params.delta) : (step2 == 0.0);
    if (stop) {
      state.converged = true;
      break;
    }
  }
  if (options.record_h && !state.trace.empty()) state.h = state.trace.back().h;
  return state;
}

LabelState run_sdie(const Vector& u0, const SdieParams& params,
                    const PropagatorConfig& cfg, const LowRankLaplacian& lap,
                    const FidelityData& fid, const SdieOptions& options) {
  return run_sdie(u0, params, make_diffusion(cfg, lap, fid), options);
}

}  // namespace gsdie
