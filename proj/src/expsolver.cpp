#include "gsdie/expsolver.hpp"

#include "gsdie/errors.hpp"

#include <cmath>
#include <iostream>

namespace gsdie {

const char* to_string(ExpScheme s) {
  switch (s) {
    case ExpScheme::strang: return "strang";
    case ExpScheme::yoshida: return "yoshida";
    case ExpScheme::euler: return "euler";
  }
  return "?";
}

const char* to_string(BMethod m) {
  switch (m) {
    case BMethod::trapezium: return "trapezium";
    case BMethod::midpoint: return "midpoint";
    case BMethod::simpson: return "simpson";
    case BMethod::composite_simpson: return "composite_simpson";
    case BMethod::ode_euler: return "ode_euler";
    case BMethod::woodbury: return "woodbury";
  }
  return "?";
}

ExpScheme exp_scheme_from_string(const std::string& s) {
  if (s == "strang") return ExpScheme::strang;
  if (s == "yoshida") return ExpScheme::yoshida;
  if (s == "euler") return ExpScheme::euler;
  throw InputError("unknown exponential scheme: " + s);
}

BMethod b_method_from_string(const std::string& s) {
  if (s == "trapezium") return BMethod::trapezium;
  if (s == "midpoint") return BMethod::midpoint;
  if (s == "simpson") return BMethod::simpson;
  if (s == "composite_simpson") return BMethod::composite_simpson;
  if (s == "ode_euler") return BMethod::ode_euler;
  if (s == "woodbury") return BMethod::woodbury;
  throw InputError("unknown b method: " + s);
}

void PropagatorConfig::validate() const {
  if (k < 1) throw InputError("PropagatorConfig: k must be >= 1");
  if (k_b < 1) throw InputError("PropagatorConfig: k_b must be >= 1");
  if (tau < 0.0) throw InputError("PropagatorConfig: tau must be nonnegative");
  if (b_method == BMethod::composite_simpson && simpson_m < 1)
    throw InputError("PropagatorConfig: composite Simpson needs m >= 1");
}

StrangCoefficients StrangCoefficients::make(double dt, const Vector& mu,
                                            const Vector& lambda) {
  StrangCoefficients c;
  c.a1 = (-dt * mu.array()).exp();
  c.a2 = (-dt * lambda.array()).exp() - 1.0;
  c.a3 = (-0.5 * dt * mu.array()).exp();
  return c;
}

Vector strang_step(const Vector& v, const StrangCoefficients& coeffs,
                   const LowRankLaplacian& lap) {
  if (v.size() != lap.size() || coeffs.a1.size() != lap.size() ||
      coeffs.a2.size() != lap.rank)
    throw InputError("strang_step: dimension mismatch");
  const Vector inner = coeffs.a2.cwiseProduct(lap.u2.transpose() * coeffs.a3.cwiseProduct(v));
  return coeffs.a1.cwiseProduct(v) + coeffs.a3.cwiseProduct(lap.u1 * inner);
}

namespace {
// Yoshida composition weights: a0 + 2 a1 = 1.
const double kCbrt2 = std::cbrt(2.0);
const double kYoshidaA0 = -kCbrt2 / (2.0 - kCbrt2);
const double kYoshidaA1 = 1.0 / (2.0 - kCbrt2);
}  // namespace

YoshidaCoefficients YoshidaCoefficients::make(double dt, const Vector& mu,
                                              const Vector& lambda) {
  YoshidaCoefficients c;
  c.outer = StrangCoefficients::make(kYoshidaA1 * dt, mu, lambda);
  c.inner = StrangCoefficients::make(kYoshidaA0 * dt, mu, lambda);
  return c;
}

Vector yoshida_step(const Vector& v, const YoshidaCoefficients& coeffs,
                    const LowRankLaplacian& lap) {
  return strang_step(strang_step(strang_step(v, coeffs.outer, lap), coeffs.inner, lap),
                     coeffs.outer, lap);
}

Vector yoshida_step(const Vector& v, double dt, const LowRankLaplacian& lap,
                    const Vector& mu) {
  return yoshida_step(v, YoshidaCoefficients::make(dt, mu, lap.lambda), lap);
}

Vector euler_step(const Vector& v, double dt, const LowRankLaplacian& lap,
                  const FidelityData& fid) {
  if (v.size() != lap.size() || fid.mu.size() != lap.size())
    throw InputError("euler_step: dimension mismatch");
  const Vector denom = Vector::Ones(lap.rank) + dt * lap.lambda;
  if ((denom.array().abs() < 1e-300).any())
    throw NumericError("euler_step: singular step, 1 + dt*Lambda has a zero entry");
  const Vector rhs = (Vector::Ones(v.size()) - dt * fid.mu).cwiseProduct(v) + dt * fid.f;
  return lap.u1 * denom.cwiseInverse().cwiseProduct(lap.u2.transpose() * rhs);
}

Vector propagate(const Vector& u, const PropagatorConfig& cfg,
                 const LowRankLaplacian& lap, const FidelityData& fid) {
  cfg.validate();
  if (cfg.tau == 0.0) return u;
  const double dt = cfg.tau / cfg.k;
  Vector v = u;
  switch (cfg.scheme) {
    case ExpScheme::strang: {
      const auto coeffs = StrangCoefficients::make(dt, fid.mu, lap.lambda);
      for (int r = 0; r < cfg.k; ++r) v = strang_step(v, coeffs, lap);
      return v;
    }
    case ExpScheme::yoshida: {
      const auto coeffs = YoshidaCoefficients::make(dt, fid.mu, lap.lambda);
      for (int r = 0; r < cfg.k; ++r) v = yoshida_step(v, coeffs, lap);
      return v;
    }
    case ExpScheme::euler: {
      if (dt * fid.mu.lpNorm<Eigen::Infinity>() >= 1.0)
        std::cerr << "warning: euler scheme has dt*max(mu) >= 1; the update "
                     "1 - dt*mu changes sign\n";
      for (int r = 0; r < cfg.k; ++r) v = euler_step(v, dt, lap, fid);
      return v;
    }
  }
  throw InputError("propagate: unknown scheme");
}

Vector expm_lowrank(const Vector& x, double theta, int steps, ExpScheme scheme,
                    const LowRankLaplacian& lap, const Vector& mu) {
  if (steps < 1) throw InputError("expm_lowrank: steps must be >= 1");
  if (theta == 0.0) return x;
  const double dt = theta / steps;
  Vector v = x;
  if (scheme == ExpScheme::yoshida) {
    const auto coeffs = YoshidaCoefficients::make(dt, mu, lap.lambda);
    for (int r = 0; r < steps; ++r) v = yoshida_step(v, coeffs, lap);
  } else {
    const auto coeffs = StrangCoefficients::make(dt, mu, lap.lambda);
    for (int r = 0; r < steps; ++r) v = strang_step(v, coeffs, lap);
  }
  return v;
}

namespace {

// Pseudoinverse threshold for the diagonal Sigma in the Woodbury method.
constexpr double kSigmaPinvTol = 1e-12;

Vector woodbury_b(const PropagatorConfig& cfg, ExpScheme exp_scheme,
                  const LowRankLaplacian& lap, const FidelityData& fid) {
  const Vector g =
      fid.f - expm_lowrank(fid.f, cfg.tau, cfg.k_b, exp_scheme, lap, fid.mu);
  const Vector y = (Vector::Ones(lap.size()) + fid.mu).cwiseInverse();
  Vector sigma_pinv(lap.rank);
  for (Index i = 0; i < lap.rank; ++i) {
    const double s = 1.0 - lap.lambda(i);
    sigma_pinv(i) = std::abs(s) > kSigmaPinvTol ? 1.0 / s : 0.0;
  }
  Matrix system = lap.u2.transpose() * (y.asDiagonal() * lap.u1);
  system -= Matrix(sigma_pinv.asDiagonal());
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible())
    throw NumericError(
        "compute_b: Woodbury system is singular; try another b_method");
  const Vector h = lu.solve(lap.u2.transpose() * y.cwiseProduct(g));
  return y.cwiseProduct(g - lap.u1 * h);
}

}  // namespace

Vector compute_b(const PropagatorConfig& cfg, const LowRankLaplacian& lap,
                 const FidelityData& fid) {
  cfg.validate();
  const double tau = cfg.tau;
  if (tau == 0.0) return Vector::Zero(lap.size());
  // The quadrature and Woodbury methods need a pure matrix exponential; when
  // the main scheme is euler they fall back to Strang.
  const ExpScheme exp_scheme =
      cfg.scheme == ExpScheme::euler ? ExpScheme::strang : cfg.scheme;
  const auto expm = [&](const Vector& x, double theta) {
    return expm_lowrank(x, theta, cfg.k_b, exp_scheme, lap, fid.mu);
  };
  switch (cfg.b_method) {
    case BMethod::trapezium:
      return 0.5 * tau * (fid.f + expm(fid.f, tau));
    case BMethod::midpoint:
      return tau * expm(fid.f, 0.5 * tau);
    case BMethod::simpson:
      return (tau / 6.0) * (fid.f + 4.0 * expm(fid.f, 0.5 * tau) + expm(fid.f, tau));
    case BMethod::composite_simpson: {
      const int m = cfg.simpson_m;
      const double h = tau / (2.0 * m);
      Vector v = fid.f;
      Vector acc = fid.f;  // weight 1 at the left endpoint
      if (exp_scheme == ExpScheme::yoshida) {
        const auto coeffs = YoshidaCoefficients::make(h, fid.mu, lap.lambda);
        for (int r = 1; r <= 2 * m; ++r) {
          v = yoshida_step(v, coeffs, lap);
          acc += (r == 2 * m ? 1.0 : (r % 2 == 1 ? 4.0 : 2.0)) * v;
        }
      } else {
        const auto coeffs = StrangCoefficients::make(h, fid.mu, lap.lambda);
        for (int r = 1; r <= 2 * m; ++r) {
          v = strang_step(v, coeffs, lap);
          acc += (r == 2 * m ? 1.0 : (r % 2 == 1 ? 4.0 : 2.0)) * v;
        }
      }
      return (h / 3.0) * acc;
    }
    case BMethod::ode_euler: {
      const double dt = tau / cfg.k_b;
      Vector v = Vector::Zero(lap.size());
      for (int r = 0; r < cfg.k_b; ++r) v = euler_step(v, dt, lap, fid);
      return v;
    }
    case BMethod::woodbury:
      return woodbury_b(cfg, exp_scheme, lap, fid);
  }
  throw InputError("compute_b: unknown method");
}

Vector apply_S_tau(const Vector& u, const PropagatorConfig& cfg,
                   const LowRankLaplacian& lap, const FidelityData& fid,
                   const Vector* cached_b) {
  if (cfg.scheme == ExpScheme::euler) return propagate(u, cfg, lap, fid);
  if (cached_b != nullptr) return propagate(u, cfg, lap, fid) + *cached_b;
  return propagate(u, cfg, lap, fid) + compute_b(cfg, lap, fid);
}

}  // namespace gsdie
