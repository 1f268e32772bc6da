#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mlsroute/capacity.hpp"
#include "mlsroute/lattice.hpp"

namespace mlsroute {

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReservationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;
using Path = std::vector<NodeIndex>;

enum class NodeRole { Subject, Object, Forwarder, Endpoint };

inline std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Subject: return "subject";
    case NodeRole::Object: return "object";
    case NodeRole::Forwarder: return "forwarder";
    case NodeRole::Endpoint: return "endpoint";
  }
  return "forwarder";
}

inline std::optional<NodeRole> parse_node_role(std::string_view text) {
  if (text == "subject") return NodeRole::Subject;
  if (text == "object") return NodeRole::Object;
  if (text == "forwarder") return NodeRole::Forwarder;
  if (text == "endpoint") return NodeRole::Endpoint;
  return std::nullopt;
}

struct Node {
  std::string id;
  NodeRole role = NodeRole::Forwarder;
  ObjectMode object_mode = ObjectMode::Both;  // meaningful for NodeRole::Object only
  Label label;
  std::map<std::string, std::string> addresses;  // e.g. "mac", "ip"

  [[nodiscard]] bool can_initiate() const noexcept {
    return role == NodeRole::Subject || role == NodeRole::Endpoint;
  }
  [[nodiscard]] bool serves(ObjectMode mode) const noexcept {
    if (role == NodeRole::Endpoint) return true;
    return role == NodeRole::Object && (object_mode == mode || object_mode == ObjectMode::Both);
  }
};

struct Link {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  Capacity capacity;
  /// Reverse direction of the same physical link, absent for one-way links.
  std::optional<LinkIndex> twin;
};

/// Labeled, capacitated directed graph. Structure is fixed once built; mutable
/// residual capacity lives in a ResidualLedger.
class Topology {
 public:
  Topology() : Topology(default_level_names(), CategoryUniverse::make(CategoryUniverse::default_names())) {}

  Topology(std::vector<std::string> level_names, UniversePtr universe)
      : level_names_(std::move(level_names)), universe_(std::move(universe)) {
    if (level_names_.empty()) throw TopologyError("at least one security level is required");
    if (!universe_) throw TopologyError("category universe is required");
  }

  NodeIndex add_node(Node node) {
    if (node.id.empty()) throw TopologyError("node id must not be empty");
    if (index_.contains(node.id)) throw TopologyError("duplicate node id '" + node.id + "'");
    if (node.label.level.value() > level_count()) {
      throw TopologyError("node '" + node.id + "' level exceeds declared levels");
    }
    if (!node.label.categories.universe()) {
      node.label.categories = CategorySet(universe_);
    } else if (!(*node.label.categories.universe() == *universe_)) {
      throw TopologyError("node '" + node.id + "' uses a foreign category universe");
    }
    const NodeIndex idx = nodes_.size();
    index_.emplace(node.id, idx);
    nodes_.push_back(std::move(node));
    out_.emplace_back();
    in_.emplace_back();
    return idx;
  }

  /// One directed link.
  LinkIndex add_link(NodeIndex src, NodeIndex dst, Capacity capacity) {
    check_node(src);
    check_node(dst);
    if (src == dst) throw TopologyError("self loop on '" + nodes_[src].id + "'");
    if (capacity < 0) throw TopologyError("negative capacity on link " + nodes_[src].id + "->" + nodes_[dst].id);
    if (link_between(src, dst)) {
      throw TopologyError("duplicate link " + nodes_[src].id + "->" + nodes_[dst].id);
    }
    const LinkIndex idx = links_.size();
    links_.push_back(Link{src, dst, capacity, std::nullopt});
    out_[src].push_back(idx);
    in_[dst].push_back(idx);
    adjacency_.emplace(key(src, dst), idx);
    return idx;
  }

  /// A physical link stored as two directed twins with equal capacity.
  std::pair<LinkIndex, LinkIndex> add_physical_link(NodeIndex a, NodeIndex b, Capacity capacity) {
    const LinkIndex forward = add_link(a, b, capacity);
    const LinkIndex backward = add_link(b, a, capacity);
    links_[forward].twin = backward;
    links_[backward].twin = forward;
    return {forward, backward};
  }

  [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const std::vector<Link>& links() const noexcept { return links_; }
  [[nodiscard]] const Node& node(NodeIndex i) const { return nodes_.at(i); }
  [[nodiscard]] const Link& link(LinkIndex i) const { return links_.at(i); }
  [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::size_t link_count() const noexcept { return links_.size(); }

  /// Physical links: twin pairs count once.
  [[nodiscard]] std::size_t physical_link_count() const noexcept {
    std::size_t n = 0;
    for (LinkIndex i = 0; i < links_.size(); ++i) {
      if (!links_[i].twin || *links_[i].twin > i) ++n;
    }
    return n;
  }

  [[nodiscard]] std::span<const LinkIndex> out_links(NodeIndex i) const { return out_.at(i); }
  [[nodiscard]] std::span<const LinkIndex> in_links(NodeIndex i) const { return in_.at(i); }

  [[nodiscard]] std::optional<NodeIndex> find(std::string_view id) const {
    if (auto it = index_.find(std::string(id)); it != index_.end()) return it->second;
    return std::nullopt;
  }

  [[nodiscard]] NodeIndex at(std::string_view id) const {
    if (auto idx = find(id)) return *idx;
    throw TopologyError("unknown node '" + std::string(id) + "'");
  }

  [[nodiscard]] std::optional<LinkIndex> link_between(NodeIndex src, NodeIndex dst) const {
    if (auto it = adjacency_.find(key(src, dst)); it != adjacency_.end()) return it->second;
    return std::nullopt;
  }

  /// 1-based port on `from` leading to `to`, in link declaration order.
  [[nodiscard]] std::optional<int> port_towards(NodeIndex from, NodeIndex to) const {
    const auto& out = out_.at(from);
    for (std::size_t p = 0; p < out.size(); ++p) {
      if (links_[out[p]].dst == to) return static_cast<int>(p + 1);
    }
    return std::nullopt;
  }

  [[nodiscard]] std::optional<NodeIndex> neighbor_on_port(NodeIndex from, int port) const {
    const auto& out = out_.at(from);
    if (port < 1 || static_cast<std::size_t>(port) > out.size()) return std::nullopt;
    return links_[out[static_cast<std::size_t>(port - 1)]].dst;
  }

  [[nodiscard]] const std::vector<std::string>& level_names() const noexcept { return level_names_; }
  [[nodiscard]] int level_count() const noexcept { return static_cast<int>(level_names_.size()); }
  [[nodiscard]] const UniversePtr& universe() const noexcept { return universe_; }

  [[nodiscard]] SecurityLevel level_of(NodeIndex i) const { return nodes_.at(i).label.level; }

  /// Relabeling helper used by generators and benchmarks.
  void set_label(NodeIndex i, Label label) {
    check_node(i);
    if (label.level.value() > level_count()) throw TopologyError("level exceeds declared levels");
    if (!label.categories.universe()) label.categories = CategorySet(universe_);
    nodes_[i].label = std::move(label);
  }

  void set_address(NodeIndex i, const std::string& layer, std::string address) {
    check_node(i);
    nodes_[i].addresses[layer] = std::move(address);
  }

  void set_capacity(LinkIndex i, Capacity capacity) {
    if (i >= links_.size()) throw TopologyError("link index out of range");
    if (capacity < 0) throw TopologyError("negative capacity");
    links_[i].capacity = capacity;
  }

  void set_level_names(std::vector<std::string> names) {
    if (names.empty()) throw TopologyError("at least one security level is required");
    for (const auto& n : nodes_) {
      if (n.label.level.value() > static_cast<int>(names.size())) {
        throw TopologyError("node '" + n.id + "' level exceeds declared levels");
      }
    }
    level_names_ = std::move(names);
  }

  [[nodiscard]] CategorySet empty_categories() const { return CategorySet(universe_); }

 private:
  static std::uint64_t key(NodeIndex a, NodeIndex b) noexcept {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }
  void check_node(NodeIndex i) const {
    if (i >= nodes_.size()) throw TopologyError("node index out of range");
  }

  std::vector<std::string> level_names_;
  UniversePtr universe_;
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkIndex>> out_;
  std::vector<std::vector<LinkIndex>> in_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::unordered_map<std::uint64_t, LinkIndex> adjacency_;
};

/// Residual capacity per directed link for one routing session.
class ResidualLedger {
 public:
  explicit ResidualLedger(const Topology& topo) : residual_(topo.link_count()) {
    for (LinkIndex i = 0; i < topo.link_count(); ++i) residual_[i] = topo.link(i).capacity;
  }

  [[nodiscard]] const Capacity& residual(LinkIndex i) const { return residual_.at(i); }
  [[nodiscard]] const std::vector<Capacity>& residuals() const noexcept { return residual_; }

  /// Whether `demand` fits on link i and, for physical links, on its twin.
  [[nodiscard]] bool fits(const Topology& topo, LinkIndex i, const Capacity& demand) const {
    if (residual_.at(i) < demand) return false;
    const auto& twin = topo.link(i).twin;
    return !twin || residual_[*twin] >= demand;
  }

  /// Debits demand on every traversed link and its reverse twin; all or nothing.
  void reserve(const Topology& topo, const Path& path, const Capacity& demand) {
    const auto touched = links_touched(topo, path);
    std::vector<Capacity> need(residual_.size(), Capacity(0));
    for (LinkIndex l : touched) need[l] += demand;
    for (LinkIndex l : touched) {
      if (residual_[l] < need[l]) {
        throw ReservationError("insufficient residual on " + topo.node(topo.link(l).src).id + "->" +
                               topo.node(topo.link(l).dst).id);
      }
    }
    for (LinkIndex l : touched) residual_[l] -= demand;
  }

  void release(const Topology& topo, const Path& path, const Capacity& demand) {
    const auto touched = links_touched(topo, path);
    std::vector<Capacity> give(residual_.size(), Capacity(0));
    for (LinkIndex l : touched) give[l] += demand;
    for (LinkIndex l : touched) {
      if (residual_[l] + give[l] > topo.link(l).capacity) {
        throw ReservationError("release exceeds capacity on " + topo.node(topo.link(l).src).id + "->" +
                               topo.node(topo.link(l).dst).id);
      }
    }
    for (LinkIndex l : touched) residual_[l] += demand;
  }

 private:
  static std::vector<LinkIndex> links_touched(const Topology& topo, const Path& path) {
    std::vector<LinkIndex> out;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const auto l = topo.link_between(path[k], path[k + 1]);
      if (!l) {
        throw ReservationError("no link " + topo.node(path[k]).id + "->" + topo.node(path[k + 1]).id);
      }
      out.push_back(*l);
      if (const auto& twin = topo.link(*l).twin) out.push_back(*twin);
    }
    return out;
  }

  std::vector<Capacity> residual_;
};

struct DiameterResult {
  int hops = 0;
  bool disconnected = false;  // some ordered pair has no path
};

/// Maximum BFS hop distance over reachable ordered pairs.
inline DiameterResult diameter(const Topology& topo) {
  DiameterResult result;
  const std::size_t n = topo.node_count();
  std::vector<int> dist(n);
  std::queue<NodeIndex> frontier;
  for (NodeIndex src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[src] = 0;
    frontier.push(src);
    std::size_t reached = 1;
    while (!frontier.empty()) {
      const NodeIndex u = frontier.front();
      frontier.pop();
      for (LinkIndex l : topo.out_links(u)) {
        const NodeIndex v = topo.link(l).dst;
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          result.hops = std::max(result.hops, dist[v]);
          ++reached;
          frontier.push(v);
        }
      }
    }
    if (reached != n) result.disconnected = true;
  }
  return result;
}

enum class FatTreeTier { Core, Aggregation, Edge, Host };

struct FatTreeSlot {
  FatTreeTier tier;
  int pod = -1;    // -1 for core switches
  int index = 0;   // position within the tier (and pod)
  std::string id;
};

using LabelFn = std::function<Label(const FatTreeSlot&)>;

/// k-ary fat tree: (k/2)^2 core, k pods of k/2 aggregation + k/2 edge switches,
/// k^3/4 hosts. Hosts are endpoints carrying "mac"/"ip" addresses.
inline Topology fat_tree(int k, const LabelFn& host_label, const LabelFn& switch_label, Capacity capacity,
                         std::vector<std::string> level_names = default_level_names(),
                         UniversePtr universe = CategoryUniverse::make(CategoryUniverse::default_names())) {
  if (k < 2 || k % 2 != 0) throw TopologyError("fat tree arity must be even and >= 2");
  Topology topo(std::move(level_names), std::move(universe));
  const int half = k / 2;

  auto add = [&](FatTreeSlot slot, NodeRole role) {
    Label label = role == NodeRole::Endpoint ? host_label(slot) : switch_label(slot);
    Node node{slot.id, role, ObjectMode::Both, std::move(label), {}};
    return topo.add_node(std::move(node));
  };

  std::vector<NodeIndex> core;
  for (int i = 0; i < half * half; ++i) {
    core.push_back(add({FatTreeTier::Core, -1, i, "c" + std::to_string(i)}, NodeRole::Forwarder));
  }
  int host_serial = 0;
  for (int pod = 0; pod < k; ++pod) {
    std::vector<NodeIndex> aggr;
    std::vector<NodeIndex> edge;
    const std::string p = std::to_string(pod);
    for (int i = 0; i < half; ++i) {
      aggr.push_back(add({FatTreeTier::Aggregation, pod, i, "a" + p + "_" + std::to_string(i)},
                         NodeRole::Forwarder));
    }
    for (int i = 0; i < half; ++i) {
      edge.push_back(add({FatTreeTier::Edge, pod, i, "e" + p + "_" + std::to_string(i)}, NodeRole::Forwarder));
    }
    for (int e = 0; e < half; ++e) {
      for (int h = 0; h < half; ++h) {
        const std::string id = "h" + p + "_" + std::to_string(e) + "_" + std::to_string(h);
        const NodeIndex host = add({FatTreeTier::Host, pod, e * half + h, id}, NodeRole::Endpoint);
        ++host_serial;
        char mac[18];
        std::snprintf(mac, sizeof mac, "00:00:%02x:%02x:%02x:%02x", (host_serial >> 24) & 0xff,
                      (host_serial >> 16) & 0xff, (host_serial >> 8) & 0xff, host_serial & 0xff);
        topo.set_address(host, "mac", mac);
        topo.set_address(host, "ip", "10." + p + "." + std::to_string(e) + "." + std::to_string(h + 2));
        topo.add_physical_link(edge[static_cast<std::size_t>(e)], host, capacity);
      }
    }
    for (NodeIndex e : edge) {
      for (NodeIndex a : aggr) topo.add_physical_link(e, a, capacity);
    }
    for (int a = 0; a < half; ++a) {
      for (int c = 0; c < half; ++c) {
        topo.add_physical_link(aggr[static_cast<std::size_t>(a)], core[static_cast<std::size_t>(a * half + c)],
                               capacity);
      }
    }
  }
  return topo;
}

/// Uniform-label fat tree: every node at the lowest level, hosts holding every category.
inline Topology fat_tree(int k, Capacity capacity) {
  auto universe = CategoryUniverse::make(CategoryUniverse::default_names());
  const CategorySet all(universe, universe->full_mask());
  const CategorySet none(universe);
  return fat_tree(
      k, [&](const FatTreeSlot&) { return Label{SecurityLevel(1), all}; },
      [&](const FatTreeSlot&) { return Label{SecurityLevel(1), none}; }, capacity, default_level_names(),
      universe);
}

}  // namespace mlsroute
