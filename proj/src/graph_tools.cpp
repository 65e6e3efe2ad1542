#include "smallloss/graph_tools.hpp"

#include <algorithm>
#include <bit>

namespace smallloss {

ArmMask make_mask(std::size_t n, std::span<const ArmId> ids) {
  ArmMask mask(n, 0);
  for (ArmId i : ids) {
    require(i < n, Errc::ArmOutOfRange, "mask member out of range");
    mask[i] = 1;
  }
  return mask;
}

std::vector<ArmId> mask_members(const ArmMask& mask) {
  std::vector<ArmId> out;
  for (ArmId i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(i);
  return out;
}

double observation_mass(const FeedbackGraph& g, const Distribution& p, ArmId i,
                        const ArmMask& excluded) {
  require(p.size() == g.n_arms(), Errc::LengthMismatch, "distribution/graph size mismatch");
  require(excluded.empty() || excluded.size() == g.n_arms(), Errc::LengthMismatch,
          "excluded mask size mismatch");
  double mass = 0.0;
  for (ArmId j : g.closed_neighborhood(i))
    if (excluded.empty() || !excluded[j]) mass += p[j];
  return std::clamp(mass, 0.0, 1.0);
}

IndependentSet greedy_maximal_independent_set(const FeedbackGraph& g,
                                              std::span<const ArmId> candidates) {
  std::vector<ArmId> order(candidates.begin(), candidates.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  IndependentSet out;
  out.graph_n = g.n_arms();
  ArmMask blocked(g.n_arms(), 0);
  for (ArmId c : order) {
    require(c < g.n_arms(), Errc::ArmOutOfRange, "candidate out of range");
    if (blocked[c]) continue;
    out.members.push_back(c);
    for (ArmId j : g.closed_neighborhood(c)) blocked[j] = 1;
  }
  return out;
}

bool is_independent(const FeedbackGraph& g, std::span<const ArmId> members) {
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b)
      if (members[a] == members[b] || g.adjacent(members[a], members[b])) return false;
  return true;
}

namespace {

// Branch on the lowest remaining vertex: either take it (dropping its
// neighbors) or drop it. Prunes when the remaining set cannot beat `best`.
void mis_search(const std::vector<std::uint32_t>& adj, std::uint32_t remaining,
                int current, int& best) {
  if (remaining == 0) {
    best = std::max(best, current);
    return;
  }
  if (current + std::popcount(remaining) <= best) return;
  const int v = std::countr_zero(remaining);
  const std::uint32_t bit = 1u << v;
  // Vertices with no remaining neighbors are always safe to take.
  if ((adj[v] & remaining) == 0) {
    mis_search(adj, remaining & ~bit, current + 1, best);
    return;
  }
  mis_search(adj, remaining & ~bit & ~adj[v], current + 1, best);
  mis_search(adj, remaining & ~bit, current, best);
}

}  // namespace

std::size_t exact_independence_number(const FeedbackGraph& g) {
  const std::size_t n = g.n_arms();
  require(n <= 30, Errc::TooLarge, "exact independence number limited to 30 arms");
  if (n == 0) return 0;
  std::vector<std::uint32_t> adj(n, 0);
  for (ArmId i = 0; i < n; ++i)
    for (ArmId j : g.closed_neighborhood(i))
      if (j != i) adj[i] |= 1u << j;
  int best = 0;
  const std::uint32_t all = n == 32 ? ~0u : ((1u << n) - 1u);
  mis_search(adj, all, 0, best);
  return static_cast<std::size_t>(best);
}

}  // namespace smallloss
