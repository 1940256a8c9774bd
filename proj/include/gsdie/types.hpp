#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace gsdie {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexList = std::vector<Index>;

// Symmetric nonnegative weight accessor; never materialised for large graphs.
using WeightFn = std::function<double(Index, Index)>;

// Which Laplacian the dynamics run on. random_walk is D^{-1}(D - w) with the
// degree-weighted inner product (r = 1); symmetric is I - D^{-1/2} w D^{-1/2}
// paired with the plain Euclidean inner product (r = 0).
enum class Normalization { random_walk, symmetric };

inline const char* to_string(Normalization n) {
  return n == Normalization::random_walk ? "random_walk" : "symmetric";
}

}  // namespace gsdie
