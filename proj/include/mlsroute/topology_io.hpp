#pragma once

// Topology file format (JSON):
//   { "levels": ["Public", ...], "categories": ["ARP", ...],
//     "nodes": [ {"id", "role", "mode"?, "level", "categories"?, "addresses"?} ],
//     "links": [ {"src", "dst", "capacity": "10", "directed"?: true} ] }
// Undirected link entries become twin directed links.

#include <string>
#include <string_view>

#include <json.hpp>

#include "mlsroute/topology.hpp"

namespace mlsroute {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline const ojson& require(const ojson& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(where + ": missing '" + key + "'");
  }
  return obj.at(key);
}

inline std::string require_string(const ojson& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) throw ParseError(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

inline std::vector<std::string> string_list(const ojson& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) throw ParseError(where + ": expected an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

inline Capacity json_capacity(const ojson& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_capacity(v.get<std::string>());
    if (v.is_number_integer()) return Capacity(v.get<std::int64_t>());
  } catch (const CapacityParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ": numeric values must be decimal strings or integers");
}

inline SecurityLevel json_level(const ojson& v, const std::vector<std::string>& names, const std::string& where) {
  if (v.is_number_integer()) {
    const auto n = v.get<int>();
    if (n < 1 || n > static_cast<int>(names.size())) throw ParseError(where + ": level out of range");
    return SecurityLevel(n);
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == s) return SecurityLevel(static_cast<int>(i + 1));
    }
    throw ParseError(where + ": unknown level '" + s + "'");
  }
  throw ParseError(where + ": level must be a name or an integer");
}

inline CategorySet json_categories(const ojson& v, const UniversePtr& universe, const std::string& where) {
  CategorySet set(universe);
  for (const auto& name : string_list(v, where)) {
    if (!universe->index_of(name)) throw ParseError(where + ": unknown category '" + name + "'");
    set.insert(name);
  }
  return set;
}

inline ojson parse_document(std::string_view text) {
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace detail

inline Topology topology_from_json(const nlohmann::ordered_json& doc) {
  using detail::ojson;
  if (!doc.is_object()) throw ParseError("topology: top level must be an object");
  const auto levels = doc.contains("levels") ? detail::string_list(doc.at("levels"), "levels")
                                             : default_level_names();
  const auto categories = doc.contains("categories") ? detail::string_list(doc.at("categories"), "categories")
                                                     : CategoryUniverse::default_names();
  UniversePtr universe;
  try {
    universe = CategoryUniverse::make(categories);
  } catch (const LatticeError& e) {
    throw ParseError(std::string("categories: ") + e.what());
  }
  Topology topo(levels, universe);

  const auto& nodes = detail::require(doc, "nodes", "topology");
  if (!nodes.is_array()) throw ParseError("nodes: expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    std::string where = "nodes[" + std::to_string(i) + "]";
    Node node;
    node.id = detail::require_string(n, "id", where);
    where += " '" + node.id + "'";
    const auto role_text = n.contains("role") ? detail::require_string(n, "role", where) : "forwarder";
    const auto role = parse_node_role(role_text);
    if (!role) throw ParseError(where + ": unknown role '" + role_text + "'");
    node.role = *role;
    if (n.contains("mode")) {
      try {
        node.object_mode = parse_object_mode(detail::require_string(n, "mode", where));
      } catch (const LatticeError& e) {
        throw ParseError(where + ": " + e.what());
      }
    }
    node.label.level = detail::json_level(detail::require(n, "level", where), levels, where);
    node.label.categories = n.contains("categories") ? detail::json_categories(n.at("categories"), universe, where)
                                                     : CategorySet(universe);
    if (n.contains("addresses")) {
      const auto& addr = n.at("addresses");
      if (!addr.is_object()) throw ParseError(where + ": addresses must be an object");
      for (const auto& [layer, value] : addr.items()) {
        if (!value.is_string()) throw ParseError(where + ": address '" + layer + "' must be a string");
        node.addresses[layer] = value.get<std::string>();
      }
    }
    try {
      topo.add_node(std::move(node));
    } catch (const TopologyError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }

  const auto& links = detail::require(doc, "links", "topology");
  if (!links.is_array()) throw ParseError("links: expected an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    const std::string where = "links[" + std::to_string(i) + "]";
    const auto src = detail::require_string(l, "src", where);
    const auto dst = detail::require_string(l, "dst", where);
    const auto a = topo.find(src);
    if (!a) throw ParseError(where + ": undeclared node '" + src + "'");
    const auto b = topo.find(dst);
    if (!b) throw ParseError(where + ": undeclared node '" + dst + "'");
    const Capacity cap = detail::json_capacity(detail::require(l, "capacity", where), where);
    const bool directed = l.contains("directed") && l.at("directed").is_boolean() && l.at("directed").get<bool>();
    try {
      if (directed) {
        topo.add_link(*a, *b, cap);
      } else {
        topo.add_physical_link(*a, *b, cap);
      }
    } catch (const TopologyError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return topo;
}

inline Topology load_topology(std::string_view text) {
  return topology_from_json(detail::parse_document(text));
}

inline nlohmann::ordered_json topology_to_json(const Topology& topo) {
  using detail::ojson;
  ojson doc;
  doc["levels"] = topo.level_names();
  doc["categories"] = topo.universe()->names();
  ojson nodes = ojson::array();
  for (const auto& n : topo.nodes()) {
    ojson j;
    j["id"] = n.id;
    j["role"] = std::string(to_string(n.role));
    if (n.role == NodeRole::Object) j["mode"] = std::string(to_string(n.object_mode));
    j["level"] = topo.level_names()[static_cast<std::size_t>(n.label.level.value() - 1)];
    j["categories"] = n.label.categories.names();
    if (!n.addresses.empty()) {
      ojson addr = ojson::object();
      for (const auto& [layer, value] : n.addresses) addr[layer] = value;
      j["addresses"] = addr;
    }
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  ojson links = ojson::array();
  for (LinkIndex i = 0; i < topo.link_count(); ++i) {
    const auto& l = topo.link(i);
    if (l.twin && *l.twin < i) continue;
    ojson j;
    j["src"] = topo.node(l.src).id;
    j["dst"] = topo.node(l.dst).id;
    j["capacity"] = format_capacity(l.capacity);
    if (!l.twin) j["directed"] = true;
    links.push_back(std::move(j));
  }
  doc["links"] = std::move(links);
  return doc;
}

inline std::string save_topology(const Topology& topo) {
  return topology_to_json(topo).dump(2) + "\n";
}

/// Structural equality: same declarations, labels, addresses and links.
inline bool same_topology(const Topology& a, const Topology& b) {
  return topology_to_json(a) == topology_to_json(b);
}

}  // namespace mlsroute
