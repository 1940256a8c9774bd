#pragma once

#include "gsdie/types.hpp"

#include <optional>

namespace gsdie {

// Gaussian similarity Omega(z, w) = exp(-|z - w|^2 / (ell * sigma^2)).
struct GaussianSimilarity {
  double sigma = 35.0;  // kernel scale
  Index ell = 1;        // feature dimension
};

double gaussian_similarity(const Eigen::Ref<const Vector>& z,
                           const Eigen::Ref<const Vector>& w,
                           const GaussianSimilarity& sim);

// Finite weighted graph. Weights are evaluated on demand through the
// accessor; only the dense construction materialises them. Degrees are exact
// in dense mode and externally supplied estimates (Nystrom d-hat) in
// compressed mode, so V-norms in diagnostics stay well-defined at scale.
class Graph {
 public:
  // Validates symmetry, nonnegativity, zero diagonal and connectivity.
  static Graph dense(Matrix weights, Normalization normalization);

  // No connectivity check; connectivity is an assumption of the theory that
  // compressed construction cannot verify.
  static Graph compressed(Index n, WeightFn weight, Vector degree_estimate,
                          Normalization normalization);

  Index size() const { return n_; }
  double weight(Index i, Index j) const { return weight_(i, j); }
  const WeightFn& weight_fn() const { return weight_; }
  const Vector& degrees() const { return degrees_; }
  bool degrees_estimated() const { return degrees_estimated_; }
  Normalization normalization() const { return normalization_; }

  // Exponent of the degree weight in the V-inner product: 1 for the random
  // walk Laplacian, 0 for the symmetric normalisation (which does not fit the
  // degree-weighted framework).
  int r() const { return normalization_ == Normalization::random_walk ? 1 : 0; }

  // d_i^r, the V-inner-product weights.
  Vector v_weights() const;

  // Dense weight matrix; nullptr for compressed graphs.
  const Matrix* dense_weights() const {
    return dense_weights_.has_value() ? &*dense_weights_ : nullptr;
  }

 private:
  Graph() = default;
  Index n_ = 0;
  WeightFn weight_;
  Vector degrees_;
  bool degrees_estimated_ = false;
  Normalization normalization_ = Normalization::random_walk;
  std::optional<Matrix> dense_weights_;
};

double inner_product_V(const Vector& u, const Vector& v, const Graph& g);
double norm_V(const Vector& u, const Graph& g);

// BFS on the positive-weight edge set.
bool is_connected(const Matrix& weights);

// Dense Laplacian of the requested normalisation: D^{-1}(D - w) or
// I - D^{-1/2} w D^{-1/2}. Any zero degree is a degenerate-graph error.
Matrix dense_laplacian(const Matrix& weights, Normalization normalization);
Matrix dense_laplacian(const Graph& g);

// Fidelity data: strengths mu supported on Z, reference f_tilde on Z, and the
// combined forcing f = mu .* f_tilde.
struct FidelityData {
  Vector mu;       // >= 0, not all zero
  Vector f_tilde;  // in [0,1], zero off supp(mu)
  IndexList support;
  Vector f;  // mu .* f_tilde

  static FidelityData make(Vector mu, Vector f_tilde);
};

// Ginzburg-Landau energy with double-obstacle potential and fidelity term:
//   0.5 <u, Du>_V + (1/eps) sum_i d_i^r W(u_i) + 0.5 sum_i d_i^r mu_i (u_i - f~_i)^2
// with W(x) = x(1-x)/2 on [0,1]. Outside [0,1] the potential is infinite and
// the function returns +inf rather than throwing, so energy traces can mark
// infeasibility.
double ginzburg_landau_fidelity(const Vector& u, const Graph& g,
                                const FidelityData& fid, double eps);

}  // namespace gsdie
