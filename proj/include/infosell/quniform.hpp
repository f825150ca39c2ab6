#pragma once

#include <vector>

#include "infosell/common.hpp"
#include "infosell/protocol.hpp"

namespace infosell {

// The set Xi_q of q-uniform posteriors: averages of multisets of q canonical
// basis vectors, i.e. grid points with coordinates in {0, 1/q, ..., 1}.
struct QUniformSet {
  int q = 0;
  std::vector<Posterior> posteriors;   // lexicographically ordered, no duplicates

  int size() const { return static_cast<int>(posteriors.size()); }
};

// Exact enumeration of Xi_q. |Xi_q| = C(q+d-1, d-1); throws ExplosionGuard
// when that exceeds `cap`.
QUniformSet enumerate_quniform(int d, int q, std::size_t cap = Caps{}.quniform);

// Lemma-6-style decomposition: gamma_xi is the probability that the empirical
// mean of q i.i.d. draws from `target` equals xi. Support lies in Xi_q and the
// mean reproduces `target` within 1e-9. Weights below 1e-15 are pruned and the
// distribution renormalized.
PosteriorDistribution decompose_multinomial(const Posterior& target, int q,
                                            std::size_t cap = Caps{}.quniform);

// Lemma-8-style decomposition: support restricted to the q-uniform posteriors
// within infinity-distance alpha^2/(18 d) of `target`, weights from a pure
// feasibility LP (basic solution, so support size <= d+1). Requires
// q >= ceil(18 d / alpha^2); throws InfeasibleDecomposition when the target
// lies outside the hull of its grid neighborhood.
PosteriorDistribution decompose_local(const Posterior& target, int q, double alpha,
                                      std::size_t cap = Caps{}.quniform);

}  // namespace infosell
