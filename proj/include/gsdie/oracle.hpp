#pragma once

#include "gsdie/graph.hpp"
#include "gsdie/rng.hpp"
#include "gsdie/sdie.hpp"
#include "gsdie/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gsdie {

// Dense, small-n exact reference for the forced diffusion generator
// A = Delta + diag(mu). One symmetric eigendecomposition is reused for every
// exponential, inverse and phi-function apply. For the random walk Laplacian
// the similarity D^{1/2} A D^{-1/2} = Delta_s + M is what gets decomposed.
class DenseOperator {
 public:
  DenseOperator(Graph g, FidelityData fid);

  Index size() const { return n_; }
  const Graph& graph() const { return graph_; }
  const FidelityData& fidelity() const { return fid_; }
  const Matrix& a_matrix() const { return a_; }
  const Vector& spectrum() const { return eigenvalues_; }  // of A, ascending
  double xi1() const { return eigenvalues_(0); }           // min sigma(A) > 0
  double norm_delta() const { return norm_delta_; }        // V-operator norm of Delta

  Vector expm_apply(double t, const Vector& u) const;  // e^{-tA} u
  Vector ainv_apply(const Vector& x) const;            // A^{-1} x
  Vector exact_b(double tau) const;                    // A^{-1}(I - e^{-tau A}) f
  Vector exact_S_tau(const Vector& u, double tau) const;

  // Requires eps^{-1} to stay at least `gap` away from sigma(A).
  void require_eps_resolvent_gap(double eps, double gap = 1e-8) const;

  // Exact affine diffusion map (holds a reference to *this).
  DiffusionMap diffusion(double tau) const;

 private:
  Index n_;
  Graph graph_;
  FidelityData fid_;
  Matrix a_;
  Vector eigenvalues_;
  Matrix eigenvectors_;     // of the symmetrised A
  Vector scale_to_sym_;     // d^{1/2} (ones when r = 0)
  Vector scale_from_sym_;   // d^{-1/2}
  double norm_delta_;
};

// Fine-step SDIE approximation of the Allen-Cahn trajectory at time t:
// the iterate at step ceil(t / tau_ref) computed with the exact S_tau.
Vector ace_reference(const Vector& u0, double t, double eps, const DenseOperator& op,
                     double tau_ref);

// Random connected test graph: Erdos-Renyi edges with probability p, weights
// uniform in (0.1, 1], resampled until connected.
Matrix random_connected_weights(Index n, double p, SplitMix64& rng);

// Random instance for theorem checks: connected graph, fidelity on a random
// nonempty subset with strictly positive strengths, reference in [0,1].
struct RandomInstance {
  Graph graph;
  FidelityData fid;
};
RandomInstance random_instance(SplitMix64& rng, Index n_min, Index n_max,
                               Normalization normalization);

// One verified property: worst margin over all trials (>= 0 means the
// inequality held with that slack; each check bakes in its tolerance).
struct CheckResult {
  std::string property;
  int trials = 0;
  double worst_margin = 0.0;
  bool pass = true;
};

using UpdateFn = std::function<UpdateResult(const Vector&, double)>;

// Individual checks (all seeded and reproducible). Margins follow the
// convention above.
CheckResult check_laplacian_identities(std::uint64_t seed, int trials, Index n_min,
                                       Index n_max);
CheckResult check_a_spectrum(std::uint64_t seed, int trials, Index n_min, Index n_max);
CheckResult check_expm_nonnegative(std::uint64_t seed, int trials, Index n_min,
                                   Index n_max);
CheckResult check_diffusion_monotone(std::uint64_t seed, int trials, Index n_min,
                                     Index n_max);
CheckResult check_diffusion_range(std::uint64_t seed, int trials, Index n_min,
                                  Index n_max);
// Brute-force (ternary search) verification of the variational update; `fn`
// is injectable so a tampered update can serve as a negative control.
CheckResult check_update_variational(std::uint64_t seed, int trials, const UpdateFn& fn);
CheckResult check_beta_membership(std::uint64_t seed, int trials, Index n_min,
                                  Index n_max);
CheckResult check_mbo_equivalence(std::uint64_t seed, int n_vectors);
CheckResult check_lyapunov_decrease(std::uint64_t seed, int trials, Index n_min,
                                    Index n_max);
CheckResult check_mbo_termination(std::uint64_t seed, int trials, int max_iter,
                                  Index n_min, Index n_max);
CheckResult check_sdie_stability(std::uint64_t seed, int trials, Index n_min,
                                 Index n_max);
CheckResult check_ace_stability(std::uint64_t seed, int trials, Index n_min,
                                Index n_max);
CheckResult check_sdie_to_ace(std::uint64_t seed, int trials, Index n );
CheckResult check_beta_characterization(std::uint64_t seed, int trials, Index n_min,
                                        Index n_max);
CheckResult check_gl_decrease(std::uint64_t seed, int trials, Index n_min, Index n_max);
CheckResult check_holder_bound(std::uint64_t seed, int trials, Index n_min, Index n_max);
CheckResult check_htau_identity(std::uint64_t seed, int trials, Index n_min,
                                Index n_max);
CheckResult check_nth_term(std::uint64_t seed, int trials, Index n_min, Index n_max);

struct VerifyConfig {
  std::uint64_t seed = 1;
  int trials = 50;
  Index n_min = 6;
  Index n_max = 12;
};

struct PropertyReport {
  std::vector<CheckResult> entries;
  bool all_pass() const;
};

// The full numerical battery backing the `verify` command.
PropertyReport verify_theorems(const VerifyConfig& cfg);

}  // namespace gsdie
