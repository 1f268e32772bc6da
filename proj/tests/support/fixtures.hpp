#pragma once

#include <string>
#include <vector>

#include "mlsroute/policy.hpp"

namespace fixture {

using namespace mlsroute;

inline Node endpoint(const std::string& id, int level, NodeRole role = NodeRole::Endpoint) {
  Node n;
  n.id = id;
  n.role = role;
  n.label.level = SecurityLevel(level);
  return n;
}

/// Six-node ring: s -t- o across the top, s -b1-b2-b3- o along the bottom.
/// s and o sit at `end_level`; t at 2, b* at 3.
inline Topology two_route_ring(int end_level = 4, Capacity capacity = Capacity(10)) {
  Topology t;
  const auto all = t.universe()->full_mask();
  auto add = [&](const std::string& id, int level, NodeRole role) {
    Node n = endpoint(id, level, role);
    n.label.categories = CategorySet(t.universe(), role == NodeRole::Forwarder ? 0 : all);
    return t.add_node(std::move(n));
  };
  const auto s = add("s", end_level, NodeRole::Subject);
  const auto o = add("o", end_level, NodeRole::Object);
  const auto top = add("t", 2, NodeRole::Forwarder);
  const auto b1 = add("b1", 3, NodeRole::Forwarder);
  const auto b2 = add("b2", 3, NodeRole::Forwarder);
  const auto b3 = add("b3", 3, NodeRole::Forwarder);
  t.add_physical_link(s, top, capacity);
  t.add_physical_link(top, o, capacity);
  t.add_physical_link(s, b1, capacity);
  t.add_physical_link(b1, b2, capacity);
  t.add_physical_link(b2, b3, capacity);
  t.add_physical_link(b3, o, capacity);
  t.set_address(s, "mac", "00:00:00:00:00:01");
  t.set_address(s, "ip", "10.0.0.1");
  t.set_address(o, "mac", "00:00:00:00:00:05");
  t.set_address(o, "ip", "10.0.0.5");
  return t;
}

inline FlowRequest flow(const std::string& id, const std::string& s, const std::string& o,
                        ObjectMode mode = ObjectMode::Provider, Capacity demand = Capacity(1)) {
  FlowRequest f;
  f.id = id;
  f.subject = s;
  f.object = o;
  f.mode = mode;
  f.demand = demand;
  return f;
}

}  // namespace fixture
