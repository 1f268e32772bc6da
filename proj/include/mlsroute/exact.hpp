#pragma once

// Exact solvers for small instances of the two routing problems:
//   - flow maximization: route as many flows as possible on policy-compliant
//     paths within link capacity;
//   - conflict minimization: route every admitted flow within capacity,
//     minimizing the summed gamma^conf path costs.
//
// Each flow takes at most one simple path, so both problems reduce to a
// choice among each flow's enumerated simple paths. Branch-and-bound over
// those choices, in a canonical order, is complete and deterministic.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlsroute/routing.hpp"

namespace mlsroute {

struct ExactLimits {
  std::size_t max_nodes = 16;
  std::size_t max_flows = 8;
  std::size_t max_paths_per_flow = 100000;
};

class InstanceTooLarge : public RoutingError {
 public:
  using RoutingError::RoutingError;
};

class InfeasibleInstance : public RoutingError {
 public:
  InfeasibleInstance(std::string flow_id, const std::string& why)
      : RoutingError("infeasible: flow '" + flow_id + "' " + why), flow_id_(std::move(flow_id)) {}
  [[nodiscard]] const std::string& flow_id() const noexcept { return flow_id_; }

 private:
  std::string flow_id_;
};

enum class OptimalityProof { Exhaustive, BranchBoundClosed };

inline std::string_view to_string(OptimalityProof p) {
  return p == OptimalityProof::Exhaustive ? "exhaustive" : "branch-bound-closed";
}

struct ExactFlowAssignment {
  std::string flow_id;
  bool alpha = false;
  Path path;  // empty when alpha is false
  PathCost cost;
};

struct ExactSolution {
  Cost objective = 0;
  std::vector<ExactFlowAssignment> flows;  // input order
  OptimalityProof proof = OptimalityProof::Exhaustive;
  std::size_t search_nodes = 0;
};

/// Simple s->o paths in canonical DFS order (neighbors by link declaration).
/// `admit(link)` filters traversable links. Throws InstanceTooLarge past `limit`.
template <class Admit>
std::vector<Path> enumerate_simple_paths(const Topology& t, NodeIndex s, NodeIndex o, Admit&& admit,
                                         std::size_t limit) {
  std::vector<Path> out;
  Path stack{s};
  std::vector<bool> on_path(t.node_count(), false);
  on_path[s] = true;
  auto dfs = [&](auto&& self, NodeIndex u) -> void {
    if (u == o) {
      if (out.size() >= limit) throw InstanceTooLarge("simple-path count exceeds " + std::to_string(limit));
      out.push_back(stack);
      return;
    }
    for (LinkIndex l : t.out_links(u)) {
      const NodeIndex v = t.link(l).dst;
      if (on_path[v] || !admit(l)) continue;
      on_path[v] = true;
      stack.push_back(v);
      self(self, v);
      stack.pop_back();
      on_path[v] = false;
    }
  };
  dfs(dfs, s);
  return out;
}

namespace detail {

inline void check_limits(const Topology& t, std::size_t flows, const ExactLimits& limits) {
  if (t.node_count() > limits.max_nodes) {
    throw InstanceTooLarge("node count " + std::to_string(t.node_count()) + " exceeds limit " +
                           std::to_string(limits.max_nodes));
  }
  if (flows > limits.max_flows) {
    throw InstanceTooLarge("flow count " + std::to_string(flows) + " exceeds limit " +
                           std::to_string(limits.max_flows));
  }
}

/// Candidate path with the directed links it loads (twins included).
struct Candidate {
  Path path;
  std::vector<LinkIndex> load;
  PathCost cost;
};

inline std::vector<LinkIndex> loaded_links(const Topology& t, const Path& p) {
  std::vector<LinkIndex> out;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    const LinkIndex l = *t.link_between(p[k], p[k + 1]);
    out.push_back(l);
    if (const auto& tw = t.link(l).twin) out.push_back(*tw);
  }
  return out;
}

/// Link loads shared by the branch-and-bound searches.
class LoadState {
 public:
  explicit LoadState(const Topology& t) : t_(t), used_(t.link_count(), Capacity(0)) {}

  [[nodiscard]] bool fits(const Candidate& c, const Capacity& d) const {
    for (LinkIndex l : c.load) {
      if (used_[l] + d > t_.link(l).capacity) return false;
    }
    return true;
  }
  void apply(const Candidate& c, const Capacity& d) {
    for (LinkIndex l : c.load) used_[l] += d;
  }
  void undo(const Candidate& c, const Capacity& d) {
    for (LinkIndex l : c.load) used_[l] -= d;
  }

 private:
  const Topology& t_;
  std::vector<Capacity> used_;
};

}  // namespace detail

/// Maximizes the number of flows routed on policy-compliant paths.
inline ExactSolution exact_max_flows(const Topology& t, const std::vector<FlowRequest>& flows,
                                     const ExactLimits& limits = {}) {
  detail::check_limits(t, flows.size(), limits);
  const ConflictWeights unit(2, t.level_count(), t.link_count());
  const std::size_t n = flows.size();
  std::vector<std::vector<detail::Candidate>> cands(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FlowRequest& f = flows[i];
    bool permitted = false;
    try {
      permitted = access_permitted(f, t).permitted;
    } catch (const std::exception&) {
      permitted = false;
    }
    if (!permitted) continue;
    const auto [s, o] = resolve_endpoints(f, t);
    const SecurityLevel origin = orig(t.level_of(o), t.level_of(s), f.mode);
    auto admit = [&](LinkIndex l) {
      return origin <= t.level_of(t.link(l).dst) && f.demand <= t.link(l).capacity &&
             (!t.link(l).twin || f.demand <= t.link(*t.link(l).twin).capacity);
    };
    auto paths = enumerate_simple_paths(t, s, o, admit, limits.max_paths_per_flow);
    std::stable_sort(paths.begin(), paths.end(), [](const Path& a, const Path& b) { return a.size() < b.size(); });
    for (auto& p : paths) {
      auto load = detail::loaded_links(t, p);
      auto cost = path_conflict_cost(p, f, t, unit);
      cands[i].push_back({std::move(p), std::move(load), std::move(cost)});
    }
  }

  // suffix[k]: flows at or after k that have at least one candidate.
  std::vector<int> suffix(n + 1, 0);
  for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] + (cands[k].empty() ? 0 : 1);

  detail::LoadState state(t);
  std::vector<int> choice(n, -1);
  std::vector<int> best_choice(n, -1);
  int best = -1;
  bool pruned = false;
  std::size_t visited = 0;

  auto go = [&](auto&& self, std::size_t k, int routed) -> void {
    ++visited;
    if (best >= 0 && routed + suffix[k] <= best) {
      pruned = true;
      return;
    }
    if (k == n) {
      best = routed;
      best_choice = choice;
      return;
    }
    for (std::size_t c = 0; c < cands[k].size(); ++c) {
      if (!state.fits(cands[k][c], flows[k].demand)) continue;
      state.apply(cands[k][c], flows[k].demand);
      choice[k] = static_cast<int>(c);
      self(self, k + 1, routed + 1);
      choice[k] = -1;
      state.undo(cands[k][c], flows[k].demand);
      if (best == suffix[0]) return;
    }
    self(self, k + 1, routed);
  };
  go(go, 0, 0);

  ExactSolution sol;
  sol.objective = best;
  sol.proof = pruned ? OptimalityProof::BranchBoundClosed : OptimalityProof::Exhaustive;
  sol.search_nodes = visited;
  for (std::size_t i = 0; i < n; ++i) {
    ExactFlowAssignment a;
    a.flow_id = flows[i].id;
    if (best_choice[i] >= 0) {
      const auto& c = cands[i][static_cast<std::size_t>(best_choice[i])];
      a.alpha = true;
      a.path = c.path;
      a.cost = c.cost;
    }
    sol.flows.push_back(std::move(a));
  }
  return sol;
}

/// Routes every flow, minimizing total conflict cost. Throws InfeasibleInstance
/// naming a flow that cannot be placed.
inline ExactSolution exact_min_conflict(const Topology& t, const std::vector<FlowRequest>& flows,
                                        const ConflictWeights& weights, const ExactLimits& limits = {}) {
  detail::check_limits(t, flows.size(), limits);
  const std::size_t n = flows.size();
  std::vector<std::vector<detail::Candidate>> cands(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FlowRequest& f = flows[i];
    const auto [s, o] = resolve_endpoints(f, t);
    auto admit = [&](LinkIndex l) {
      return f.demand <= t.link(l).capacity && (!t.link(l).twin || f.demand <= t.link(*t.link(l).twin).capacity);
    };
    auto paths = enumerate_simple_paths(t, s, o, admit, limits.max_paths_per_flow);
    if (paths.empty()) throw InfeasibleInstance(f.id, "has no capacity-feasible path");
    for (auto& p : paths) {
      auto load = detail::loaded_links(t, p);
      auto cost = path_conflict_cost(p, f, t, weights);
      cands[i].push_back({std::move(p), std::move(load), std::move(cost)});
    }
    std::stable_sort(cands[i].begin(), cands[i].end(), [](const auto& a, const auto& b) {
      if (a.cost.cost != b.cost.cost) return a.cost.cost < b.cost.cost;
      return a.path.size() < b.path.size();
    });
  }

  // lower[k]: sum of per-flow minimum costs for flows at or after k.
  std::vector<Cost> lower(n + 1, Cost(0));
  for (std::size_t k = n; k-- > 0;) lower[k] = lower[k + 1] + cands[k].front().cost.cost;

  detail::LoadState state(t);
  std::vector<int> choice(n, -1);
  std::vector<int> best_choice;
  std::optional<Cost> best;
  bool pruned = false;
  std::size_t visited = 0;
  std::size_t deepest_failure = 0;

  auto go = [&](auto&& self, std::size_t k, const Cost& cost) -> void {
    ++visited;
    if (k == n) {
      best = cost;
      best_choice = choice;
      return;
    }
    bool placed = false;
    for (std::size_t c = 0; c < cands[k].size(); ++c) {
      const auto& cand = cands[k][c];
      if (best && cost + cand.cost.cost + lower[k + 1] >= *best) {
        pruned = true;
        break;
      }
      if (!state.fits(cand, flows[k].demand)) continue;
      placed = true;
      state.apply(cand, flows[k].demand);
      choice[k] = static_cast<int>(c);
      self(self, k + 1, cost + cand.cost.cost);
      choice[k] = -1;
      state.undo(cand, flows[k].demand);
    }
    if (!placed && !best) deepest_failure = std::max(deepest_failure, k);
  };
  go(go, 0, Cost(0));

  if (!best) throw InfeasibleInstance(flows[deepest_failure].id, "cannot be placed within remaining capacity");

  ExactSolution sol;
  sol.objective = *best;
  sol.proof = pruned ? OptimalityProof::BranchBoundClosed : OptimalityProof::Exhaustive;
  sol.search_nodes = visited;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = cands[i][static_cast<std::size_t>(best_choice[i])];
    sol.flows.push_back({flows[i].id, true, c.path, c.cost});
  }
  return sol;
}

inline ExactSolution exact_min_conflict(const Topology& t, const std::vector<FlowRequest>& flows, int gamma,
                                        const ExactLimits& limits = {}) {
  return exact_min_conflict(t, flows, ConflictWeights(gamma, t.level_count(), t.link_count()), limits);
}

}  // namespace mlsroute
