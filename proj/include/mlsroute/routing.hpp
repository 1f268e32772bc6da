#pragma once

// Path computation for admitted flows.
//
// policy_compliant_path: hop-count shortest path restricted to nodes at or
//   above the flow's originating level and links with enough residual.
// min_conflict_path: path minimizing the sum of gamma^conf over the nodes it
//   passes through, restricted only by residual capacity.
//
// Both are Dijkstra searches with strict-less relaxation; equal-cost frontier
// nodes are settled lowest index first, so results are deterministic.
//
// Conflict cost counts interior nodes only. The terminal endpoint always has
// conflict 0 for an admitted flow, so excluding it leaves path choice
// unchanged and makes a cost equal to the conflict burden alone.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mlsroute/policy.hpp"

namespace mlsroute {

using Cost = boost::multiprecision::cpp_int;

class RoutingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// gamma^k for every severity k the topology's lattice can produce.
class ConflictWeights {
 public:
  ConflictWeights(int gamma, int level_count, std::size_t link_count) : gamma_(gamma) {
    if (gamma < 2) throw RoutingError("gamma must be >= 2");
    if (level_count < 1) throw RoutingError("level count must be >= 1");
    Cost p = 1;
    for (int k = 0; k < level_count; ++k) {
      exact_.push_back(p);
      p *= gamma;
    }
    // Machine words suffice while gamma^(L-1) * |E| fits.
    const Cost bound = exact_.back() * Cost(std::max<std::size_t>(link_count, 1));
    fits_u64_ = bound <= Cost(std::numeric_limits<std::uint64_t>::max());
    if (fits_u64_) {
      for (const auto& w : exact_) narrow_.push_back(w.convert_to<std::uint64_t>());
    }
  }

  [[nodiscard]] int gamma() const noexcept { return gamma_; }
  [[nodiscard]] bool fits_u64() const noexcept { return fits_u64_; }
  [[nodiscard]] const Cost& exact(int severity) const { return exact_.at(static_cast<std::size_t>(severity)); }
  [[nodiscard]] std::uint64_t narrow(int severity) const { return narrow_.at(static_cast<std::size_t>(severity)); }

  template <class W>
  [[nodiscard]] W get(int severity) const {
    if constexpr (std::is_same_v<W, std::uint64_t>) {
      return narrow(severity);
    } else {
      return exact(severity);
    }
  }

 private:
  int gamma_;
  bool fits_u64_ = false;
  std::vector<Cost> exact_;
  std::vector<std::uint64_t> narrow_;
};

enum class PathStatus { Found, AccessDenied, NoPath };

struct PathCost {
  Cost cost = 0;
  /// conflict_vector[k]: interior nodes with conflict severity exactly k.
  std::vector<int> conflict_vector;

  [[nodiscard]] int max_severity() const noexcept {
    for (int k = static_cast<int>(conflict_vector.size()) - 1; k > 0; --k) {
      if (conflict_vector[static_cast<std::size_t>(k)] > 0) return k;
    }
    return 0;
  }
};

struct PathResult {
  PathStatus status = PathStatus::NoPath;
  Path path;
  PathCost cost;

  [[nodiscard]] bool found() const noexcept { return status == PathStatus::Found; }
};

namespace detail {

/// Dijkstra from `source` to `target`. `admit(link)` filters traversable
/// links; `weight(head)` is the nonnegative cost of entering a node.
template <class W, class Admit, class Weight>
std::optional<Path> dijkstra(const Topology& t, NodeIndex source, NodeIndex target, Admit&& admit, Weight&& weight) {
  const std::size_t n = t.node_count();
  std::vector<std::optional<W>> dist(n);
  std::vector<NodeIndex> prev(n, n);
  std::vector<bool> settled(n, false);
  using Entry = std::pair<W, NodeIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  dist[source] = W(0);
  frontier.emplace(W(0), source);
  while (!frontier.empty()) {
    auto [d, i] = frontier.top();
    frontier.pop();
    if (settled[i]) continue;
    settled[i] = true;
    if (i == target) break;
    for (LinkIndex l : t.out_links(i)) {
      const NodeIndex j = t.link(l).dst;
      if (settled[j] || !admit(l)) continue;
      W candidate = d + weight(j);
      if (!dist[j] || candidate < *dist[j]) {
        dist[j] = candidate;
        prev[j] = i;
        frontier.emplace(std::move(candidate), j);
      }
    }
  }
  if (!settled[target]) return std::nullopt;
  Path path;
  for (NodeIndex v = target; v != source; v = prev[v]) path.push_back(v);
  path.push_back(source);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace detail

/// Conflict cost of a path for a flow; the path may run in either orientation.
inline PathCost path_conflict_cost(const Path& path, const FlowRequest& f, const Topology& t,
                                   const ConflictWeights& weights) {
  const auto [s, o] = resolve_endpoints(f, t);
  if (path.size() < 2 || !((path.front() == s && path.back() == o) || (path.front() == o && path.back() == s))) {
    throw RoutingError("flow '" + f.id + "': path does not join its endpoints");
  }
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    if (path[k] >= t.node_count() || path[k + 1] >= t.node_count() || !t.link_between(path[k], path[k + 1])) {
      throw RoutingError("flow '" + f.id + "': path uses a missing link");
    }
  }
  PathCost out;
  out.conflict_vector.assign(static_cast<std::size_t>(t.level_count()), 0);
  const SecurityLevel so = t.level_of(o);
  const SecurityLevel ss = t.level_of(s);
  for (std::size_t k = 1; k + 1 < path.size(); ++k) {
    const int c = conf(so, ss, t.level_of(path[k]), f.mode);
    out.conflict_vector.at(static_cast<std::size_t>(c)) += 1;
    out.cost += weights.exact(c);
  }
  return out;
}

inline PathCost path_conflict_cost(const Path& path, const FlowRequest& f, const Topology& t, int gamma) {
  return path_conflict_cost(path, f, t, ConflictWeights(gamma, t.level_count(), t.link_count()));
}

/// Shortest hop-count path through nodes at or above the originating level.
/// With `respect_capacity` false the residual check is skipped.
inline PathResult policy_compliant_path(const Topology& t, const ResidualLedger& ledger, const FlowRequest& f,
                                        bool respect_capacity = true) {
  PathResult result;
  if (!access_permitted(f, t)) {
    result.status = PathStatus::AccessDenied;
    return result;
  }
  const auto [s, o] = resolve_endpoints(f, t);
  const SecurityLevel origin = orig(t.level_of(o), t.level_of(s), f.mode);
  auto admit = [&](LinkIndex l) {
    const NodeIndex j = t.link(l).dst;
    return origin <= t.level_of(j) && (!respect_capacity || ledger.fits(t, l, f.demand));
  };
  auto path = detail::dijkstra<std::uint64_t>(t, s, o, admit, [](NodeIndex) { return std::uint64_t{1}; });
  if (!path) return result;
  result.status = PathStatus::Found;
  result.path = std::move(*path);
  result.cost = path_conflict_cost(result.path, f, t, ConflictWeights(2, t.level_count(), t.link_count()));
  return result;
}

/// Path minimizing the sum of gamma^conf over interior nodes, within capacity.
inline PathResult min_conflict_path(const Topology& t, const ResidualLedger& ledger, const FlowRequest& f,
                                    const ConflictWeights& weights, bool respect_capacity = true) {
  PathResult result;
  if (!access_permitted(f, t)) {
    result.status = PathStatus::AccessDenied;
    return result;
  }
  const auto [s, o] = resolve_endpoints(f, t);
  const SecurityLevel so = t.level_of(o);
  const SecurityLevel ss = t.level_of(s);
  auto admit = [&](LinkIndex l) { return !respect_capacity || ledger.fits(t, l, f.demand); };
  auto search = [&]<class W>() {
    return detail::dijkstra<W>(t, s, o, admit, [&](NodeIndex j) -> W {
      if (j == o) return W(0);
      return weights.template get<W>(conf(so, ss, t.level_of(j), f.mode));
    });
  };
  auto path = weights.fits_u64() ? search.template operator()<std::uint64_t>() : search.template operator()<Cost>();
  if (!path) return result;
  result.status = PathStatus::Found;
  result.path = std::move(*path);
  result.cost = path_conflict_cost(result.path, f, t, weights);
  return result;
}

inline PathResult min_conflict_path(const Topology& t, const ResidualLedger& ledger, const FlowRequest& f, int gamma) {
  return min_conflict_path(t, ledger, f, ConflictWeights(gamma, t.level_count(), t.link_count()));
}

/// Diameter + 1, at least 2: large enough that one extra unit of conflict
/// outweighs any detour of up to diameter hops.
inline int default_gamma(const Topology& t) {
  return std::max(2, diameter(t).hops + 1);
}

enum class RoutingMode { StrictMaximize, MinimizeConflict };
enum class FlowOrder { InputOrder, SeededShuffle };

inline std::string_view to_string(RoutingMode mode) {
  return mode == RoutingMode::StrictMaximize ? "strict" : "min-conflict";
}

struct RoutingConfig {
  std::optional<int> gamma;  // nullopt: diameter + 1
  FlowOrder order = FlowOrder::InputOrder;
  std::uint64_t seed = 0;
  RoutingMode mode = RoutingMode::MinimizeConflict;
};

enum class RouteRejection { NoCompliantPath, AccessDenied, CapacityExhausted };

inline std::string_view to_string(RouteRejection r) {
  switch (r) {
    case RouteRejection::NoCompliantPath: return "no-compliant-path";
    case RouteRejection::AccessDenied: return "access-denied";
    case RouteRejection::CapacityExhausted: return "capacity-exhausted";
  }
  return "no-compliant-path";
}

struct FlowOutcome {
  std::string flow_id;
  Capacity demand{1};
  bool routed = false;
  std::optional<RouteRejection> rejection;
  std::optional<RejectReason> access_reason;  // set for AccessDenied
  Path path;
  PathCost cost;
};

struct RoutingOutcome {
  int gamma = 2;
  RoutingMode mode = RoutingMode::MinimizeConflict;
  std::vector<FlowOutcome> flows;  // input order
  std::vector<Capacity> residuals;

  [[nodiscard]] const FlowOutcome* find(std::string_view id) const {
    for (const auto& f : flows) {
      if (f.flow_id == id) return &f;
    }
    return nullptr;
  }

  [[nodiscard]] std::size_t routed_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(flows.begin(), flows.end(), [](const auto& f) { return f.routed; }));
  }

  [[nodiscard]] Cost total_cost() const {
    Cost total = 0;
    for (const auto& f : flows) {
      if (f.routed) total += f.cost.cost;
    }
    return total;
  }

  /// Nonzero link-usage variables: (directed link, index into flows).
  [[nodiscard]] std::vector<std::pair<LinkIndex, std::size_t>> link_usage(const Topology& t) const {
    std::vector<std::pair<LinkIndex, std::size_t>> out;
    for (std::size_t fi = 0; fi < flows.size(); ++fi) {
      const auto& p = flows[fi].path;
      if (!flows[fi].routed) continue;
      for (std::size_t k = 0; k + 1 < p.size(); ++k) out.emplace_back(*t.link_between(p[k], p[k + 1]), fi);
    }
    return out;
  }
};

/// Processing order for a flow list under the configured policy.
inline std::vector<std::size_t> flow_order(std::size_t count, const RoutingConfig& cfg) {
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  if (cfg.order == FlowOrder::SeededShuffle) {
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  return order;
}

/// Admits, then routes flows one at a time against a shared residual ledger.
inline RoutingOutcome route_all(const Topology& t, const std::vector<FlowRequest>& flows, const RoutingConfig& cfg) {
  RoutingOutcome outcome;
  outcome.mode = cfg.mode;
  outcome.gamma = cfg.gamma ? *cfg.gamma : default_gamma(t);
  const ConflictWeights weights(outcome.gamma, t.level_count(), t.link_count());
  ResidualLedger ledger(t);

  outcome.flows.resize(flows.size());
  for (std::size_t i = 0; i < flows.size(); ++i) {
    outcome.flows[i].flow_id = flows[i].id;
    outcome.flows[i].demand = flows[i].demand;
  }

  for (std::size_t i : flow_order(flows.size(), cfg)) {
    const FlowRequest& f = flows[i];
    FlowOutcome& out = outcome.flows[i];
    AccessDecision access;
    try {
      access = access_permitted(f, t);
    } catch (const std::exception&) {
      access = {false, RejectReason::InvalidRequest};
    }
    if (!access) {
      out.rejection = RouteRejection::AccessDenied;
      out.access_reason = access.reason;
      continue;
    }

    PathResult found = cfg.mode == RoutingMode::StrictMaximize ? policy_compliant_path(t, ledger, f)
                                                               : min_conflict_path(t, ledger, f, weights);
    if (found.found()) {
      ledger.reserve(t, found.path, f.demand);
      out.routed = true;
      out.path = std::move(found.path);
      out.cost = std::move(found.cost);
      continue;
    }
    const PathResult relaxed = cfg.mode == RoutingMode::StrictMaximize
                                   ? policy_compliant_path(t, ledger, f, false)
                                   : min_conflict_path(t, ledger, f, weights, false);
    out.rejection = relaxed.found() ? RouteRejection::CapacityExhausted : RouteRejection::NoCompliantPath;
  }
  outcome.residuals = ledger.residuals();
  return outcome;
}

}  // namespace mlsroute
