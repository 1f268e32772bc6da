#pragma once

// Switch flow rules that match every header field a packet instantiates, up
// to its highest layer, so lower-layer-only rules cannot act as wildcards for
// traffic of another security class.
//
// Text format, one rule per line:
//   switch=e0_1 priority=100 match=type:tcp,dl_src:...,nw_dst:10.0.0.5 actions=output:2

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlsroute/policy.hpp"

namespace mlsroute {

class FlowRuleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Layer { Physical = 0, Link = 1, Arp = 2, Network = 3, Transport = 4 };

struct FieldSpec {
  std::string_view name;
  Layer layer;
};

/// Registered match fields, in emission order.
inline constexpr FieldSpec kFieldRegistry[] = {
    {"in_port", Layer::Physical}, {"type", Layer::Link},         {"dl_src", Layer::Link},
    {"dl_dst", Layer::Link},      {"arp_spa", Layer::Arp},       {"arp_tpa", Layer::Arp},
    {"nw_src", Layer::Network},   {"nw_dst", Layer::Network},    {"tp_src", Layer::Transport},
    {"tp_dst", Layer::Transport}, {"icmp_type", Layer::Transport}, {"icmp_code", Layer::Transport},
};

inline std::optional<Layer> field_layer(std::string_view name) {
  for (const auto& f : kFieldRegistry) {
    if (f.name == name) return f.layer;
  }
  return std::nullopt;
}

/// A representative packet: header field name -> value.
struct PacketDescriptor {
  std::map<std::string, std::string, std::less<>> fields;

  [[nodiscard]] bool has(std::string_view name) const { return fields.find(name) != fields.end(); }
  [[nodiscard]] const std::string* get(std::string_view name) const {
    auto it = fields.find(name);
    return it == fields.end() ? nullptr : &it->second;
  }
};

using MatchFieldSet = std::vector<std::pair<std::string, std::string>>;

/// Highest registered layer the packet carries a field for.
inline Layer highest_layer(const PacketDescriptor& p) {
  std::optional<Layer> top;
  for (const auto& [name, value] : p.fields) {
    if (auto layer = field_layer(name); layer && (!top || *layer > *top)) top = layer;
  }
  if (!top) throw FlowRuleError("packet descriptor carries no registered header field");
  return *top;
}

/// Union of the registered fields of every layer up to the packet's highest
/// layer, restricted to the fields the packet carries.
inline MatchFieldSet match_field_set(const PacketDescriptor& p) {
  if (p.fields.empty()) throw FlowRuleError("empty packet descriptor");
  const Layer top = highest_layer(p);
  bool link_layer = false;
  MatchFieldSet out;
  for (const auto& spec : kFieldRegistry) {
    if (spec.layer > top) continue;
    if (const auto* v = p.get(spec.name)) {
      out.emplace_back(std::string(spec.name), *v);
      link_layer = link_layer || spec.layer == Layer::Link;
    }
  }
  if (!link_layer) throw FlowRuleError("packet descriptor does not instantiate the link layer");
  return out;
}

struct NextHop {
  enum class Kind { Output, Drop };
  Kind kind = Kind::Drop;
  int port = 0;

  static NextHop output(int port) { return {Kind::Output, port}; }
  static NextHop drop() { return {Kind::Drop, 0}; }

  friend bool operator==(const NextHop&, const NextHop&) = default;
};

inline constexpr int kForwardPriority = 100;
inline constexpr int kDropPriority = 200;
inline constexpr int kControllerPriority = 0;

struct FlowRule {
  std::string switch_id;
  int priority = kForwardPriority;
  MatchFieldSet match;
  std::vector<std::string> actions;  // optional actions, applied before `next`
  NextHop next;

  [[nodiscard]] bool is_drop() const noexcept { return next.kind == NextHop::Kind::Drop; }

  friend bool operator==(const FlowRule&, const FlowRule&) = default;
};

/// One rule for packet P: match on the layered field union, then the optional
/// actions and the output port, or drop. Drop rules take the higher priority.
inline FlowRule generate_flow_rule(const std::vector<std::string>& actions, const PacketDescriptor& p, NextHop next,
                                   std::string switch_id = {}) {
  FlowRule rule;
  rule.switch_id = std::move(switch_id);
  rule.match = match_field_set(p);
  if (next.kind == NextHop::Kind::Output) {
    if (next.port < 1) throw FlowRuleError("invalid output port " + std::to_string(next.port));
    rule.actions = actions;
    rule.priority = kForwardPriority;
  } else {
    rule.priority = kDropPriority;
  }
  rule.next = next;
  return rule;
}

inline std::string to_string(const FlowRule& rule) {
  std::ostringstream os;
  if (!rule.switch_id.empty()) os << "switch=" << rule.switch_id << " ";
  os << "priority=" << rule.priority << " match=";
  for (std::size_t i = 0; i < rule.match.size(); ++i) {
    os << (i ? "," : "") << rule.match[i].first << ":" << rule.match[i].second;
  }
  os << " actions=";
  for (const auto& a : rule.actions) os << a << ",";
  if (rule.is_drop()) {
    os << "drop";
  } else {
    os << "output:" << rule.next.port;
  }
  return os.str();
}

namespace rule_detail {

inline std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      auto item = trim(s.substr(start, i - start));
      if (!item.empty()) out.push_back(std::move(item));
      start = i + 1;
    }
  }
  return out;
}

inline int parse_int(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw FlowRuleError("bad " + std::string(what) + " '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FlowRuleError("bad " + std::string(what) + " '" + s + "'");
  }
}

}  // namespace rule_detail

/// Parses one rule line. Whitespace after commas is tolerated.
inline FlowRule parse_flow_rule(std::string_view line) {
  FlowRule rule;
  const auto match_at = line.find("match=");
  const auto actions_at = line.find("actions=");
  if (match_at == std::string_view::npos || actions_at == std::string_view::npos || actions_at < match_at) {
    throw FlowRuleError("rule needs match= and actions= parts: '" + std::string(line) + "'");
  }
  for (const auto& tok : rule_detail::split(line.substr(0, match_at), ' ')) {
    if (tok.rfind("switch=", 0) == 0) {
      rule.switch_id = tok.substr(7);
    } else if (tok.rfind("priority=", 0) == 0) {
      rule.priority = rule_detail::parse_int(tok.substr(9), "priority");
    } else {
      throw FlowRuleError("unexpected token '" + tok + "'");
    }
  }
  const auto match_text = line.substr(match_at + 6, actions_at - match_at - 6);
  for (const auto& item : rule_detail::split(match_text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0) throw FlowRuleError("bad match field '" + item + "'");
    rule.match.emplace_back(rule_detail::trim(item.substr(0, colon)), rule_detail::trim(item.substr(colon + 1)));
  }
  const auto actions = rule_detail::split(line.substr(actions_at + 8), ',');
  if (actions.empty()) throw FlowRuleError("empty action list");
  for (std::size_t i = 0; i + 1 < actions.size(); ++i) rule.actions.push_back(actions[i]);
  const auto& last = actions.back();
  if (last == "drop") {
    rule.next = NextHop::drop();
  } else if (last.rfind("output:", 0) == 0) {
    const auto port = last.substr(7);
    rule.next = NextHop::output(port.empty() || port[0] == '#' ? 0 : rule_detail::parse_int(port, "port"));
  } else {
    throw FlowRuleError("rule must end with output:<port> or drop");
  }
  return rule;
}

inline std::string serialize_rules(const std::vector<FlowRule>& rules) {
  std::string out;
  for (const auto& r : rules) out += to_string(r) + "\n";
  return out;
}

inline std::vector<FlowRule> parse_rules(std::string_view text) {
  std::vector<FlowRule> out;
  for (const auto& line : rule_detail::split(text, '\n')) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_flow_rule(line));
  }
  return out;
}

/// Packet-level meaning of a category name: "ARP", "IP", "ICMP", "TCP", "UDP",
/// or an ICMP subtype written "ICMP/<type>/<code>".
struct CategoryProtocol {
  std::string type;  // value of the "type" match field
  bool ip_based = false;
  std::optional<std::string> icmp_type;
  std::optional<std::string> icmp_code;
};

inline std::optional<CategoryProtocol> category_protocol(std::string_view name) {
  if (name == "ARP") return CategoryProtocol{"arp", false, {}, {}};
  if (name == "IP") return CategoryProtocol{"ip", true, {}, {}};
  if (name == "ICMP") return CategoryProtocol{"icmp", true, {}, {}};
  if (name == "TCP") return CategoryProtocol{"tcp", true, {}, {}};
  if (name == "UDP") return CategoryProtocol{"udp", true, {}, {}};
  if (name.rfind("ICMP/", 0) == 0) {
    const auto parts = rule_detail::split(name.substr(5), '/');
    if (parts.size() == 2) return CategoryProtocol{"icmp", true, parts[0], parts[1]};
  }
  return std::nullopt;
}

namespace rule_detail {

struct EndpointAddrs {
  std::string mac_src, mac_dst;
  std::optional<std::string> ip_src, ip_dst;
};

inline std::string require_address(const Node& n, const char* layer) {
  auto it = n.addresses.find(layer);
  if (it == n.addresses.end()) {
    throw FlowRuleError("node '" + n.id + "' has no " + std::string(layer) + " address");
  }
  return it->second;
}

/// Categories that get their own forward rules: IP is implied by any
/// IP-based protocol and plain ICMP subsumes its subtypes.
inline std::vector<std::string> leaf_categories(const CategorySet& required) {
  const auto names = required.names();
  bool has_ip_child = false;
  for (const auto& n : names) {
    auto p = category_protocol(n);
    if (!p) throw FlowRuleError("category '" + n + "' has no packet-level mapping");
    has_ip_child = has_ip_child || (p->ip_based && n != "IP");
  }
  const bool has_icmp = std::find(names.begin(), names.end(), "ICMP") != names.end();
  std::vector<std::string> out;
  for (const auto& n : names) {
    if (n == "IP" && has_ip_child) continue;
    if (has_icmp && n.rfind("ICMP/", 0) == 0) continue;
    out.push_back(n);
  }
  return out;
}

inline PacketDescriptor descriptor(const CategoryProtocol& proto, const Node& from, const Node& to,
                                   std::optional<std::uint16_t> sport, std::optional<std::uint16_t> dport,
                                   bool with_ports) {
  PacketDescriptor p;
  p.fields["type"] = proto.type;
  p.fields["dl_src"] = require_address(from, "mac");
  p.fields["dl_dst"] = require_address(to, "mac");
  if (proto.type == "arp") {
    if (from.addresses.contains("ip") && to.addresses.contains("ip")) {
      p.fields["arp_spa"] = from.addresses.at("ip");
      p.fields["arp_tpa"] = to.addresses.at("ip");
    }
    return p;
  }
  p.fields["nw_src"] = require_address(from, "ip");
  p.fields["nw_dst"] = require_address(to, "ip");
  if (!with_ports) return p;
  if ((proto.type == "tcp" || proto.type == "udp")) {
    if (sport) p.fields["tp_src"] = std::to_string(*sport);
    if (dport) p.fields["tp_dst"] = std::to_string(*dport);
  }
  if (proto.icmp_type) p.fields["icmp_type"] = *proto.icmp_type;
  if (proto.icmp_code) p.fields["icmp_code"] = *proto.icmp_code;
  return p;
}

inline Path oriented(const Path& path, NodeIndex s, NodeIndex o) {
  if (path.size() >= 2 && path.front() == s && path.back() == o) return path;
  if (path.size() >= 2 && path.front() == o && path.back() == s) return Path(path.rbegin(), path.rend());
  throw FlowRuleError("path does not join the flow endpoints");
}

}  // namespace rule_detail

/// Representative packets of a flow in the request (subject->object) or reply direction.
inline std::vector<PacketDescriptor> flow_packets(const FlowRequest& f, const Topology& t, bool reply) {
  const auto [s, o] = resolve_endpoints(f, t);
  if (!f.required_categories.universe() || f.required_categories.empty()) {
    throw FlowRuleError("flow '" + f.id + "' has no required categories");
  }
  const Node& from = t.node(reply ? o : s);
  const Node& to = t.node(reply ? s : o);
  const auto sport = reply ? f.dst_port : f.src_port;
  const auto dport = reply ? f.src_port : f.dst_port;
  std::vector<PacketDescriptor> out;
  for (const auto& name : rule_detail::leaf_categories(f.required_categories)) {
    out.push_back(rule_detail::descriptor(*category_protocol(name), from, to, sport, dport, true));
  }
  return out;
}

/// Forward rules on every interior node of the path: for each packet type of
/// the flow, one rule per direction (reply rules mirror src/dst fields).
inline std::vector<FlowRule> rules_for_path(const Path& path, const FlowRequest& f, const Topology& t,
                                            const std::vector<std::string>& actions = {}) {
  const auto [s, o] = resolve_endpoints(f, t);
  const Path p = rule_detail::oriented(path, s, o);
  const auto request = flow_packets(f, t, false);
  const auto reply = flow_packets(f, t, true);
  std::vector<FlowRule> rules;
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    const auto out_fwd = t.port_towards(p[k], p[k + 1]);
    const auto out_rev = t.port_towards(p[k], p[k - 1]);
    if (!out_fwd || !out_rev) throw FlowRuleError("path uses a missing link at '" + t.node(p[k]).id + "'");
    const std::string& sw = t.node(p[k]).id;
    for (std::size_t i = 0; i < request.size(); ++i) {
      rules.push_back(generate_flow_rule(actions, request[i], NextHop::output(*out_fwd), sw));
      rules.push_back(generate_flow_rule(actions, reply[i], NextHop::output(*out_rev), sw));
    }
  }
  return rules;
}

/// Drop rules on every interior node for the endpoint pair's traffic of each
/// base protocol outside the flow's categories.
inline std::vector<FlowRule> drop_rules_for_path(const Path& path, const FlowRequest& f, const Topology& t) {
  const auto [s, o] = resolve_endpoints(f, t);
  const Path p = rule_detail::oriented(path, s, o);
  const auto names = f.required_categories.names();
  bool ip_child = false;
  bool icmp_sub = false;
  for (const auto& n : names) {
    ip_child = ip_child || (n != "IP" && category_protocol(n) && category_protocol(n)->ip_based);
    icmp_sub = icmp_sub || n.rfind("ICMP/", 0) == 0;
  }
  std::vector<CategoryProtocol> blocked;
  for (const auto& n : t.universe()->names()) {
    auto proto = category_protocol(n);
    if (!proto || proto->icmp_type) continue;
    if (std::find(names.begin(), names.end(), n) != names.end()) continue;
    if (n == "IP" && ip_child) continue;
    if (n == "ICMP" && icmp_sub) continue;
    blocked.push_back(*proto);
  }
  std::vector<FlowRule> rules;
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    const std::string& sw = t.node(p[k]).id;
    for (const auto& proto : blocked) {
      if (proto.type == "ip") continue;  // a plain-IP drop would shadow every IP-based forward rule
      rules.push_back(generate_flow_rule({}, rule_detail::descriptor(proto, t.node(s), t.node(o), {}, {}, false),
                                         NextHop::drop(), sw));
      rules.push_back(generate_flow_rule({}, rule_detail::descriptor(proto, t.node(o), t.node(s), {}, {}, false),
                                         NextHop::drop(), sw));
    }
  }
  return rules;
}

/// Rule pairs on one switch that could match the same packet at equal
/// priority while acting differently.
inline std::vector<std::pair<std::size_t, std::size_t>> find_overlaps(const std::vector<FlowRule>& rules) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = i + 1; j < rules.size(); ++j) {
      const auto& a = rules[i];
      const auto& b = rules[j];
      if (a.switch_id != b.switch_id || a.priority != b.priority) continue;
      if (a.next == b.next && a.actions == b.actions) continue;
      bool disjoint = false;
      for (const auto& [fa, va] : a.match) {
        for (const auto& [fb, vb] : b.match) {
          if (fa == fb && va != vb) disjoint = true;
        }
      }
      if (!disjoint) out.emplace_back(i, j);
    }
  }
  return out;
}

enum class PacketFate { Delivered, Dropped, TableMiss, Looped };

struct Trace {
  PacketFate fate = PacketFate::TableMiss;
  Path hops;  // nodes visited, starting at the sender
};

/// Walks a packet from `sender` into the network through the link towards
/// `first_hop`, applying the highest-priority matching rule at each forwarding
/// node. Delivery happens on reaching a node that is not a forwarder.
inline Trace simulate_packet(const Topology& t, const std::vector<FlowRule>& rules, NodeIndex sender,
                             NodeIndex first_hop, PacketDescriptor packet) {
  Trace trace;
  trace.hops.push_back(sender);
  NodeIndex prev = sender;
  NodeIndex cur = first_hop;
  for (std::size_t steps = 0; steps <= t.node_count(); ++steps) {
    trace.hops.push_back(cur);
    if (t.node(cur).role != NodeRole::Forwarder) {
      trace.fate = PacketFate::Delivered;
      return trace;
    }
    if (auto in_port = t.port_towards(cur, prev)) packet.fields["in_port"] = std::to_string(*in_port);
    const FlowRule* hit = nullptr;
    for (const auto& r : rules) {
      if (r.switch_id != t.node(cur).id) continue;
      const bool matches = std::all_of(r.match.begin(), r.match.end(), [&](const auto& fv) {
        const auto* v = packet.get(fv.first);
        return v && *v == fv.second;
      });
      if (matches && (!hit || r.priority > hit->priority)) hit = &r;
    }
    if (!hit) {
      trace.fate = PacketFate::TableMiss;
      return trace;
    }
    if (hit->is_drop()) {
      trace.fate = PacketFate::Dropped;
      return trace;
    }
    const auto next = t.neighbor_on_port(cur, hit->next.port);
    if (!next) {
      trace.fate = PacketFate::TableMiss;
      return trace;
    }
    prev = cur;
    cur = *next;
  }
  trace.fate = PacketFate::Looped;
  return trace;
}

}  // namespace mlsroute
