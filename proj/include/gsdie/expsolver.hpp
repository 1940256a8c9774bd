#pragma once

#include "gsdie/graph.hpp"
#include "gsdie/lowrank.hpp"
#include "gsdie/types.hpp"

#include <string>

namespace gsdie {

enum class ExpScheme { strang, yoshida, euler };
enum class BMethod {
  trapezium,
  midpoint,
  simpson,
  composite_simpson,
  ode_euler,
  woodbury,
};

const char* to_string(ExpScheme s);
const char* to_string(BMethod m);
ExpScheme exp_scheme_from_string(const std::string& s);
BMethod b_method_from_string(const std::string& s);

struct PropagatorConfig {
  ExpScheme scheme = ExpScheme::strang;
  int k = 1;    // substeps for the propagation of u
  int k_b = 1;  // substeps for the one-off computation of b
  BMethod b_method = BMethod::ode_euler;
  int simpson_m = 500;  // subintervals for composite Simpson (h = tau/(2m))
  double tau = 0.003;

  void validate() const;
};

// Elementwise coefficients of one Strang substep
//   S(dt) v = a1 .* v + a3 .* (U1 (a2 .* (U2^T (a3 .* v))))
// with a1 = exp(-dt mu), a2 = exp(-dt Lambda) - 1, a3 = exp(-dt mu / 2).
struct StrangCoefficients {
  Vector a1, a2, a3;
  static StrangCoefficients make(double dt, const Vector& mu, const Vector& lambda);
};

Vector strang_step(const Vector& v, const StrangCoefficients& coeffs,
                   const LowRankLaplacian& lap);

// Yoshida triple composition S(a1 dt) o S(a0 dt) o S(a1 dt) with
// a0 = -cbrt(2)/(2 - cbrt(2)), a1 = 1/(2 - cbrt(2)); fourth order.
struct YoshidaCoefficients {
  StrangCoefficients outer, inner;
  static YoshidaCoefficients make(double dt, const Vector& mu, const Vector& lambda);
};

Vector yoshida_step(const Vector& v, const YoshidaCoefficients& coeffs,
                    const LowRankLaplacian& lap);
Vector yoshida_step(const Vector& v, double dt, const LowRankLaplacian& lap,
                    const Vector& mu);

// Semi-implicit Euler step for the forced diffusion,
//   v' = U1 ((1 + dt Lambda)^{-1} .* (U2^T ((1 - dt mu) .* v + dt f))).
// Unlike the Strang/Yoshida steps this already incorporates the forcing f.
Vector euler_step(const Vector& v, double dt, const LowRankLaplacian& lap,
                  const FidelityData& fid);

// k substeps of the configured scheme. For strang/yoshida this approximates
// e^{-tau A} u only (the forcing b is added separately); for euler the
// iteration is the full forced diffusion, so the result approximates
// S_tau u directly.
Vector propagate(const Vector& u, const PropagatorConfig& cfg,
                 const LowRankLaplacian& lap, const FidelityData& fid);

// e^{-theta A} x through `steps` Strang or Yoshida substeps.
Vector expm_lowrank(const Vector& x, double theta, int steps, ExpScheme scheme,
                    const LowRankLaplacian& lap, const Vector& mu);

// b = A^{-1}(I - e^{-tau A}) f = int_0^tau e^{-tA} f dt by the configured
// method; independent of u, computed once per run. Quadrature and Woodbury
// methods evaluate their exponentials with k_b substeps of the configured
// scheme (strang when the scheme is euler).
Vector compute_b(const PropagatorConfig& cfg, const LowRankLaplacian& lap,
                 const FidelityData& fid);

// S_tau u = e^{-tau A} u + b. For strang/yoshida: propagate(u) + b, where b
// is taken from cached_b when supplied (it must come from compute_b with the
// same cfg/lap/fid). For euler the iteration already carries the forcing and
// cached_b is ignored.
Vector apply_S_tau(const Vector& u, const PropagatorConfig& cfg,
                   const LowRankLaplacian& lap, const FidelityData& fid,
                   const Vector* cached_b = nullptr);

}  // namespace gsdie
