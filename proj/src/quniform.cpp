#include "infosell/quniform.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "infosell/lp.hpp"

namespace infosell {

namespace {

// Enumerates all count vectors c >= 0 with sum q, lexicographically by the
// first coordinate descending... we emit ascending-lex over (c_1, ..., c_d)
// by recursing on the first coordinate from 0 upward.
void for_each_count_vector(int d, int q, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> counts(d, 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == d - 1) {
      counts[pos] = remaining;
      fn(counts);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[pos] = c;
      rec(pos + 1, remaining - c);
    }
  };
  rec(0, q);
}

}  // namespace

QUniformSet enumerate_quniform(int d, int q, std::size_t cap) {
  if (d < 1 || q < 1) throw Error("enumerate_quniform: d and q must be >= 1");
  const double count = binomial(q + d - 1, d - 1);
  if (count > static_cast<double>(cap))
    throw ExplosionGuard("q-uniform grid size " + std::to_string(count) + " exceeds cap " +
                         std::to_string(cap));
  QUniformSet set;
  set.q = q;
  set.posteriors.reserve(static_cast<std::size_t>(count));
  const double inv_q = 1.0 / q;
  for_each_count_vector(d, q, [&](const std::vector<int>& counts) {
    std::vector<double> probs(d);
    for (int i = 0; i < d; ++i) probs[i] = counts[i] * inv_q;
    set.posteriors.push_back(Posterior{std::move(probs)});
  });
  return set;
}

PosteriorDistribution decompose_multinomial(const Posterior& target, int q, std::size_t cap) {
  const int d = target.dim();
  const double count = binomial(q + d - 1, d - 1);
  if (count > static_cast<double>(cap))
    throw ExplosionGuard("q-uniform grid size exceeds cap in decompose_multinomial");

  PosteriorDistribution dist;
  const double lgq = std::lgamma(q + 1.0);
  for_each_count_vector(d, q, [&](const std::vector<int>& counts) {
    // Multinomial log-probability of the empirical frequency counts/q.
    double logw = lgq;
    for (int i = 0; i < d; ++i) {
      if (counts[i] == 0) continue;
      if (target[i] <= 0.0) {
        logw = -std::numeric_limits<double>::infinity();
        break;
      }
      logw += counts[i] * std::log(target[i]) - std::lgamma(counts[i] + 1.0);
    }
    const double w = std::exp(logw);
    if (w < 1e-15) return;  // pruned; renormalized below
    std::vector<double> probs(d);
    for (int i = 0; i < d; ++i) probs[i] = static_cast<double>(counts[i]) / q;
    dist.support.push_back(Posterior{std::move(probs)});
    dist.weights.push_back(w);
  });

  double total = 0.0;
  for (double w : dist.weights) total += w;
  if (total <= 0.0) throw NumericalFailure("decompose_multinomial produced empty support");
  for (double& w : dist.weights) w /= total;

  // Pruning must not have moved the induced mean.
  double gap = 0.0;
  for (int theta = 0; theta < d; ++theta) {
    double mass = 0.0;
    for (int i = 0; i < dist.size(); ++i) mass += dist.weights[i] * dist.support[i][theta];
    gap = std::max(gap, std::abs(mass - target[theta]));
  }
  if (gap > tol::kPosterior)
    throw NumericalFailure("decompose_multinomial mean drift " + std::to_string(gap));
  return dist;
}

PosteriorDistribution decompose_local(const Posterior& target, int q, double alpha,
                                      std::size_t cap) {
  const int d = target.dim();
  if (q < 1 || alpha <= 0.0) throw Error("decompose_local: q >= 1 and alpha > 0 required");
  const double radius = alpha * alpha / (18.0 * d);

  // Enumerate only the q-uniform points inside the infinity ball, pruning by
  // coordinate bounds during the recursion.
  std::vector<Posterior> candidates;
  std::vector<int> lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = std::max(0, static_cast<int>(std::ceil((target[i] - radius) * q - 1e-12)));
    hi[i] = std::min(q, static_cast<int>(std::floor((target[i] + radius) * q + 1e-12)));
  }
  std::vector<int> counts(d, 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (candidates.size() > cap) throw ExplosionGuard("decompose_local neighborhood exceeds cap");
    if (pos == d - 1) {
      if (remaining >= lo[pos] && remaining <= hi[pos]) {
        counts[pos] = remaining;
        std::vector<double> probs(d);
        for (int i = 0; i < d; ++i) probs[i] = static_cast<double>(counts[i]) / q;
        candidates.push_back(Posterior{std::move(probs)});
      }
      return;
    }
    int tail_lo = 0, tail_hi = 0;
    for (int i = pos + 1; i < d; ++i) {
      tail_lo += lo[i];
      tail_hi += hi[i];
    }
    for (int c = lo[pos]; c <= hi[pos]; ++c) {
      const int rest = remaining - c;
      if (rest < tail_lo || rest > tail_hi) continue;
      counts[pos] = c;
      rec(pos + 1, rest);
    }
  };
  rec(0, q);

  if (candidates.empty())
    throw InfeasibleDecomposition("no q-uniform posterior within radius of target");

  // Feasibility LP over sum gamma_xi * xi = target, gamma >= 0; the sum-to-one
  // row is implied by the consistency rows. Maximizing the weight of the
  // candidate nearest the target keeps the output deterministic and returns a
  // grid-aligned target as itself.
  std::size_t nearest = 0;
  double nearest_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double dist = 0.0;
    for (int theta = 0; theta < d; ++theta)
      dist = std::max(dist, std::abs(candidates[i][theta] - target[theta]));
    if (dist < nearest_dist - 1e-15) {
      nearest_dist = dist;
      nearest = i;
    }
  }
  LinearProgram lp;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    lp.add_var("g" + std::to_string(i), i == nearest ? 1.0 : 0.0);
  for (int theta = 0; theta < d; ++theta) {
    std::vector<double> row(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) row[i] = candidates[i][theta];
    lp.add_eq(std::move(row), target[theta]);
  }
  const LpSolution sol = solve(lp);
  if (sol.status != LpStatus::kOptimal)
    throw InfeasibleDecomposition("target outside convex hull of grid neighborhood");

  PosteriorDistribution dist;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (sol.x[i] > 0.0) {
      dist.support.push_back(candidates[i]);
      dist.weights.push_back(sol.x[i]);
    }
  }
  if (consistency_gap(dist, target.probs) > tol::kPosterior)
    throw NumericalFailure("decompose_local consistency drift");
  return dist;
}

}  // namespace infosell
