#include "gsdie/graph.hpp"

#include "gsdie/errors.hpp"
#include "gsdie/oracle.hpp"
#include "gsdie/rng.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <limits>

using namespace gsdie;

namespace {

Matrix two_node_unit() {
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  return w;
}

}  // namespace

TEST_SUITE_BEGIN("graph_core");

TEST_CASE("gaussian similarity") {
  GaussianSimilarity sim{2.0, 3};
  Vector z(3), w(3);
  z << 1, 2, 3;
  w = z;
  CHECK(gaussian_similarity(z, w, sim) == doctest::Approx(1.0));

  // |z - w|^2 = ell * sigma^2 gives exactly exp(-1).
  w << 1 + std::sqrt(12.0), 2, 3;
  CHECK(gaussian_similarity(z, w, sim) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  GaussianSimilarity sim2{1.0, 2};
  Vector a(2), b(2);
  a << 0, 0;
  b << 1, 1;
  CHECK(gaussian_similarity(a, b, sim2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

  Vector bad(3);
  CHECK_THROWS_AS(gaussian_similarity(a, bad, sim2), InputError);
}

TEST_CASE("V inner product") {
  {
    // r = 0 is the plain Euclidean product.
    Graph g = Graph::dense(two_node_unit(), Normalization::symmetric);
    Vector u(2);
    u << 1, 1;
    CHECK(inner_product_V(u, u, g) == doctest::Approx(2.0));
  }
  {
    Graph g = Graph::dense(two_node_unit(), Normalization::random_walk);
    Vector u(2);
    u << 1, 0;
    CHECK(inner_product_V(u, u, g) == doctest::Approx(1.0));
  }
  {
    Matrix w(2, 2);
    w << 0, 3, 3, 0;
    Graph g = Graph::dense(w, Normalization::random_walk);
    Vector u(2), v(2);
    u << 1, 1;
    v << 1, 1;
    CHECK(inner_product_V(u, v, g) == doctest::Approx(6.0));
  }
}

TEST_CASE("dense laplacian on the two-node graph") {
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK((dense_laplacian(two_node_unit(), Normalization::random_walk) - expected)
            .cwiseAbs()
            .maxCoeff() == doctest::Approx(0.0));
  CHECK((dense_laplacian(two_node_unit(), Normalization::symmetric) - expected)
            .cwiseAbs()
            .maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("random-walk laplacian annihilates constants") {
  SplitMix64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const Matrix w = random_connected_weights(9, 0.5, rng);
    const Matrix lap = dense_laplacian(w, Normalization::random_walk);
    CHECK((lap * Vector::Ones(9)).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("path graph symmetric laplacian spectrum") {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = w(1, 0) = 1;
  w(1, 2) = w(2, 1) = 1;
  const Matrix lap = dense_laplacian(w, Normalization::symmetric);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(lap);
  CHECK(eig.eigenvalues()(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eig.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.eigenvalues()(2) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("degenerate and malformed graphs are rejected") {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = w(1, 0) = 1;  // vertex 2 isolated
  CHECK_THROWS_AS(dense_laplacian(w, Normalization::random_walk), NumericError);
  CHECK_THROWS_AS(Graph::dense(w, Normalization::random_walk), InputError);

  Matrix asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(Graph::dense(asym, Normalization::random_walk), InputError);

  Matrix selfloop(2, 2);
  selfloop << 1, 1, 1, 0;
  CHECK_THROWS_AS(Graph::dense(selfloop, Normalization::random_walk), InputError);
}

TEST_CASE("fidelity data validation") {
  Vector mu(3), f(3);
  mu << 1, 0, 0;
  f << 0.5, 0, 0;
  const FidelityData fid = FidelityData::make(mu, f);
  CHECK(fid.support == IndexList{0});
  CHECK(fid.f(0) == doctest::Approx(0.5));

  f << 0.5, 0.1, 0;  // reference off the support
  CHECK_THROWS_AS(FidelityData::make(mu, f), InputError);
  CHECK_THROWS_AS(FidelityData::make(Vector::Zero(3), Vector::Zero(3)), InputError);
  mu << -1, 0, 0;
  CHECK_THROWS_AS(FidelityData::make(mu, Vector::Zero(3)), InputError);
}

TEST_CASE("ginzburg-landau fidelity energy") {
  Graph g = Graph::dense(two_node_unit(), Normalization::random_walk);
  Vector mu(2), ft(2);
  mu << 1, 0;
  ft << 1, 0;
  const FidelityData fid = FidelityData::make(mu, ft);

  CHECK(ginzburg_landau_fidelity(Vector::Zero(2), g,
                                 FidelityData::make(mu, Vector::Zero(2)), 0.7) ==
        doctest::Approx(0.0));

  // u = (1,0): <u, Du>_V = 1, obstacle term 0, fidelity term 0.
  Vector u(2);
  u << 1, 0;
  CHECK(ginzburg_landau_fidelity(u, g, fid, 0.3) == doctest::Approx(0.5).epsilon(1e-14));

  u << 1.2, 0;
  CHECK(ginzburg_landau_fidelity(u, g, fid, 0.3) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("ginzburg-landau agrees with term-by-term dense evaluation") {
  SplitMix64 rng(99);
  for (int t = 0; t < 5; ++t) {
    RandomInstance inst = random_instance(rng, 5, 5, Normalization::random_walk);
    const Graph& g = inst.graph;
    Vector u(5);
    for (Index i = 0; i < 5; ++i) u(i) = rng.uniform01();
    const double eps = 0.37;
    const Matrix& w = *g.dense_weights();
    // Independent evaluation: edgewise energy + explicit sums.
    double edge = 0.0;
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j) edge += 0.5 * w(i, j) * std::pow(u(i) - u(j), 2);
    double obstacle = 0.0, fidelity = 0.0;
    for (Index i = 0; i < 5; ++i) {
      obstacle += g.degrees()(i) * 0.5 * u(i) * (1 - u(i)) / eps;
      fidelity +=
          0.5 * g.degrees()(i) * inst.fid.mu(i) * std::pow(u(i) - inst.fid.f_tilde(i), 2);
    }
    const double expected = 0.5 * edge + obstacle + fidelity;
    CHECK(ginzburg_landau_fidelity(u, g, inst.fid, eps) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("laplacian self-adjointness, PSD and A-spectrum properties") {
  const CheckResult ident = check_laplacian_identities(3, 20, 5, 10);
  CHECK(ident.pass);
  const CheckResult spec = check_a_spectrum(4, 20, 5, 10);
  CHECK(spec.pass);
}

TEST_SUITE_END();
