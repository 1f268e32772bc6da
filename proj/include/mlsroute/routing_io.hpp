#pragma once

// Serialization of routing outcomes and exact solutions. Costs are written as
// decimal strings because they can exceed 64 bits.

#include <sstream>
#include <string>
#include <string_view>

#include "mlsroute/exact.hpp"
#include "mlsroute/policy_io.hpp"

namespace mlsroute {

namespace detail {

inline ojson path_ids(const Topology& t, const Path& p) {
  ojson out = ojson::array();
  for (NodeIndex n : p) out.push_back(t.node(n).id);
  return out;
}

inline std::string joined(const Topology& t, const Path& p, char sep) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += sep;
    out += t.node(p[i]).id;
  }
  return out;
}

inline std::string joined(const std::vector<int>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace detail

inline nlohmann::ordered_json outcome_to_json(const Topology& t, const RoutingOutcome& r) {
  using detail::ojson;
  ojson doc;
  doc["gamma"] = r.gamma;
  doc["mode"] = std::string(to_string(r.mode));
  doc["routed"] = r.routed_count();
  doc["total_cost"] = r.total_cost().str();
  ojson list = ojson::array();
  for (const auto& f : r.flows) {
    ojson j;
    j["id"] = f.flow_id;
    j["status"] = f.routed ? "routed" : "rejected";
    if (f.routed) {
      j["path"] = detail::path_ids(t, f.path);
      j["cost"] = f.cost.cost.str();
      j["conflict_vector"] = f.cost.conflict_vector;
    } else {
      j["reason"] = std::string(to_string(*f.rejection));
      if (f.access_reason) j["access_reason"] = std::string(to_string(*f.access_reason));
    }
    list.push_back(std::move(j));
  }
  doc["flows"] = std::move(list);
  return doc;
}

inline std::string outcome_to_csv(const Topology& t, const RoutingOutcome& r) {
  std::ostringstream os;
  os << "flow_id,status,path,cost,conflict_vector,reason\n";
  for (const auto& f : r.flows) {
    os << f.flow_id << ",";
    if (f.routed) {
      os << "routed," << detail::joined(t, f.path, ' ') << "," << f.cost.cost.str() << ","
         << detail::joined(f.cost.conflict_vector, ' ') << ",\n";
    } else {
      os << "rejected,,,," << to_string(*f.rejection);
      if (f.access_reason) os << ":" << to_string(*f.access_reason);
      os << "\n";
    }
  }
  return os.str();
}

inline std::string outcome_to_text(const Topology& t, const RoutingOutcome& r) {
  std::ostringstream os;
  os << "mode " << to_string(r.mode) << ", gamma " << r.gamma << ", routed " << r.routed_count() << "/"
     << r.flows.size() << ", total cost " << r.total_cost().str() << "\n";
  for (const auto& f : r.flows) {
    os << f.flow_id << ": ";
    if (f.routed) {
      os << detail::joined(t, f.path, '>') << " cost " << f.cost.cost.str() << "\n";
    } else {
      os << "rejected (" << to_string(*f.rejection);
      if (f.access_reason) os << ", " << to_string(*f.access_reason);
      os << ")\n";
    }
  }
  return os.str();
}

/// Reads back the routed paths of an outcome file. Rejected flows keep an empty path.
inline RoutingOutcome outcome_from_json(const nlohmann::ordered_json& doc, const Topology& t) {
  RoutingOutcome r;
  if (!doc.is_object()) throw ParseError("outcome: top level must be an object");
  if (doc.contains("gamma") && doc.at("gamma").is_number_integer()) r.gamma = doc.at("gamma").get<int>();
  if (doc.contains("mode") && doc.at("mode") == "strict") r.mode = RoutingMode::StrictMaximize;
  const auto& list = detail::require(doc, "flows", "outcome");
  if (!list.is_array()) throw ParseError("outcome flows: expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& j = list[i];
    const std::string where = "outcome flows[" + std::to_string(i) + "]";
    FlowOutcome f;
    f.flow_id = detail::require_string(j, "id", where);
    f.routed = detail::require_string(j, "status", where) == "routed";
    if (f.routed) {
      for (const auto& id : detail::string_list(detail::require(j, "path", where), where)) {
        const auto n = t.find(id);
        if (!n) throw ParseError(where + ": unknown node '" + id + "'");
        f.path.push_back(*n);
      }
      for (std::size_t k = 0; k + 1 < f.path.size(); ++k) {
        if (!t.link_between(f.path[k], f.path[k + 1])) throw ParseError(where + ": path uses a missing link");
      }
    } else {
      f.rejection = RouteRejection::NoCompliantPath;
    }
    r.flows.push_back(std::move(f));
  }
  return r;
}

inline nlohmann::ordered_json solution_to_json(const Topology& t, const ExactSolution& s, std::string_view problem) {
  using detail::ojson;
  ojson doc;
  doc["problem"] = std::string(problem);
  doc["objective"] = s.objective.str();
  doc["proof"] = std::string(to_string(s.proof));
  doc["search_nodes"] = s.search_nodes;
  ojson list = ojson::array();
  for (const auto& a : s.flows) {
    ojson j;
    j["id"] = a.flow_id;
    j["alpha"] = a.alpha ? 1 : 0;
    if (a.alpha) {
      j["path"] = detail::path_ids(t, a.path);
      j["cost"] = a.cost.cost.str();
      j["conflict_vector"] = a.cost.conflict_vector;
    }
    list.push_back(std::move(j));
  }
  doc["flows"] = std::move(list);
  return doc;
}

inline std::string solution_to_csv(const Topology& t, const ExactSolution& s) {
  std::ostringstream os;
  os << "flow_id,alpha,path,cost,conflict_vector\n";
  for (const auto& a : s.flows) {
    os << a.flow_id << "," << (a.alpha ? 1 : 0) << ",";
    if (a.alpha) os << detail::joined(t, a.path, ' ') << "," << a.cost.cost.str() << "," << detail::joined(a.cost.conflict_vector, ' ');
    else os << ",,";
    os << "\n";
  }
  return os.str();
}

}  // namespace mlsroute
