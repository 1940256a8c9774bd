#include "gsdie/graph.hpp"

#include "gsdie/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace gsdie {

double gaussian_similarity(const Eigen::Ref<const Vector>& z,
                           const Eigen::Ref<const Vector>& w,
                           const GaussianSimilarity& sim) {
  if (z.size() != sim.ell || w.size() != sim.ell)
    throw InputError("gaussian_similarity: feature dimension mismatch");
  if (sim.sigma <= 0.0) throw InputError("gaussian_similarity: sigma must be positive");
  const double d2 = (z - w).squaredNorm();
  return std::exp(-d2 / (static_cast<double>(sim.ell) * sim.sigma * sim.sigma));
}

namespace {

void check_weights(const Matrix& w) {
  const Index n = w.rows();
  if (n == 0 || w.cols() != n) throw InputError("Graph: weight matrix must be square and nonempty");
  for (Index i = 0; i < n; ++i) {
    if (w(i, i) != 0.0) throw InputError("Graph: nonzero self-weight");
    for (Index j = i + 1; j < n; ++j) {
      if (w(i, j) < 0.0 || w(j, i) < 0.0) throw InputError("Graph: negative weight");
      if (w(i, j) != w(j, i)) throw InputError("Graph: weight matrix not symmetric");
    }
  }
}

}  // namespace

bool is_connected(const Matrix& w) {
  const Index n = w.rows();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<Index> stack{0};
  seen[0] = 1;
  Index count = 1;
  while (!stack.empty()) {
    const Index i = stack.back();
    stack.pop_back();
    for (Index j = 0; j < n; ++j) {
      if (!seen[static_cast<std::size_t>(j)] && w(i, j) > 0.0) {
        seen[static_cast<std::size_t>(j)] = 1;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

Graph Graph::dense(Matrix weights, Normalization normalization) {
  check_weights(weights);
  if (!is_connected(weights)) throw InputError("Graph: graph is not connected");
  Graph g;
  g.n_ = weights.rows();
  g.degrees_ = weights.rowwise().sum();
  g.degrees_estimated_ = false;
  g.normalization_ = normalization;
  g.dense_weights_ = std::move(weights);
  const Matrix* w = &*g.dense_weights_;
  g.weight_ = [w](Index i, Index j) { return (*w)(i, j); };
  return g;
}

Graph Graph::compressed(Index n, WeightFn weight, Vector degree_estimate,
                        Normalization normalization) {
  if (n <= 0) throw InputError("Graph: vertex count must be positive");
  if (degree_estimate.size() != n)
    throw InputError("Graph: degree estimate has wrong length");
  if ((degree_estimate.array() <= 0.0).any())
    throw InputError("Graph: degree estimate must be strictly positive");
  Graph g;
  g.n_ = n;
  g.weight_ = std::move(weight);
  g.degrees_ = std::move(degree_estimate);
  g.degrees_estimated_ = true;
  g.normalization_ = normalization;
  return g;
}

Vector Graph::v_weights() const {
  if (r() == 0) return Vector::Ones(n_);
  return degrees_;
}

double inner_product_V(const Vector& u, const Vector& v, const Graph& g) {
  if (u.size() != g.size() || v.size() != g.size())
    throw InputError("inner_product_V: dimension mismatch");
  if (g.r() == 0) return u.dot(v);
  return (u.array() * v.array() * g.degrees().array()).sum();
}

double norm_V(const Vector& u, const Graph& g) {
  return std::sqrt(inner_product_V(u, u, g));
}

Matrix dense_laplacian(const Matrix& weights, Normalization normalization) {
  check_weights(weights);
  const Index n = weights.rows();
  const Vector d = weights.rowwise().sum();
  if ((d.array() <= 0.0).any())
    throw NumericError("dense_laplacian: zero degree (disconnected vertex)");
  if (normalization == Normalization::random_walk) {
    Matrix lap = -(d.cwiseInverse().asDiagonal() * weights);
    lap.diagonal().array() += 1.0;
    return lap;
  }
  const Vector dis = d.array().rsqrt();
  Matrix lap = -(dis.asDiagonal() * weights * dis.asDiagonal());
  lap.diagonal().array() += 1.0;
  return lap;
}

Matrix dense_laplacian(const Graph& g) {
  if (g.dense_weights() == nullptr)
    throw InputError("dense_laplacian: graph has no materialised weights");
  return dense_laplacian(*g.dense_weights(), g.normalization());
}

FidelityData FidelityData::make(Vector mu, Vector f_tilde) {
  if (mu.size() != f_tilde.size())
    throw InputError("FidelityData: mu and f_tilde must have equal length");
  if ((mu.array() < 0.0).any()) throw InputError("FidelityData: mu must be nonnegative");
  FidelityData fid;
  for (Index i = 0; i < mu.size(); ++i) {
    if (mu(i) > 0.0) {
      fid.support.push_back(i);
    } else if (f_tilde(i) != 0.0) {
      throw InputError("FidelityData: reference must vanish off the support of mu");
    }
    if (f_tilde(i) < 0.0 || f_tilde(i) > 1.0)
      throw InputError("FidelityData: reference values must lie in [0,1]");
  }
  if (fid.support.empty()) throw InputError("FidelityData: mu must not be identically zero");
  fid.f = mu.cwiseProduct(f_tilde);
  fid.mu = std::move(mu);
  fid.f_tilde = std::move(f_tilde);
  return fid;
}

double ginzburg_landau_fidelity(const Vector& u, const Graph& g,
                                const FidelityData& fid, double eps) {
  if (u.size() != g.size() || fid.mu.size() != g.size())
    throw InputError("ginzburg_landau_fidelity: dimension mismatch");
  if (eps <= 0.0) throw InputError("ginzburg_landau_fidelity: eps must be positive");
  if ((u.array() < 0.0).any() || (u.array() > 1.0).any())
    return std::numeric_limits<double>::infinity();
  const Matrix lap = dense_laplacian(g);
  const Vector w = g.v_weights();
  const double dirichlet = 0.5 * inner_product_V(u, lap * u, g);
  const double obstacle =
      (w.array() * 0.5 * u.array() * (1.0 - u.array())).sum() / eps;
  const double fidelity =
      0.5 * (w.array() * fid.mu.array() * (u - fid.f_tilde).array().square()).sum();
  return dirichlet + obstacle + fidelity;
}

}  // namespace gsdie
