#pragma once

// Flow request files:
//   { "flows": [ {"id", "subject", "object", "mode"?: "provider",
//                 "demand"?: "1", "categories"?: ["TCP"],
//                 "src_port"?: 40000, "dst_port"?: 80} ] }

#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mlsroute/policy.hpp"
#include "mlsroute/topology_io.hpp"

namespace mlsroute {

namespace detail {

inline std::optional<std::uint16_t> json_port(const ojson& f, const char* key, const std::string& where) {
  if (!f.contains(key)) return std::nullopt;
  const auto& v = f.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() > 65535) {
    throw ParseError(where + ": '" + key + "' must be an integer in 0..65535");
  }
  return static_cast<std::uint16_t>(v.get<std::int64_t>());
}

}  // namespace detail

inline std::vector<FlowRequest> flows_from_json(const nlohmann::ordered_json& doc, const UniversePtr& universe) {
  const auto& list = doc.is_array() ? doc : detail::require(doc, "flows", "flow file");
  if (!list.is_array()) throw ParseError("flows: expected an array");
  std::vector<FlowRequest> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& f = list[i];
    std::string where = "flows[" + std::to_string(i) + "]";
    FlowRequest r;
    r.id = detail::require_string(f, "id", where);
    where += " '" + r.id + "'";
    r.subject = detail::require_string(f, "subject", where);
    r.object = detail::require_string(f, "object", where);
    if (f.contains("mode")) {
      try {
        r.mode = parse_object_mode(detail::require_string(f, "mode", where));
      } catch (const LatticeError& e) {
        throw ParseError(where + ": " + e.what());
      }
    }
    if (f.contains("demand")) r.demand = detail::json_capacity(f.at("demand"), where);
    r.required_categories = f.contains("categories") ? detail::json_categories(f.at("categories"), universe, where)
                                                     : CategorySet(universe);
    r.src_port = detail::json_port(f, "src_port", where);
    r.dst_port = detail::json_port(f, "dst_port", where);
    try {
      r.validate();
    } catch (const PolicyError& e) {
      throw ParseError(where + ": " + e.what());
    }
    for (const auto& prev : out) {
      if (prev.id == r.id) throw ParseError(where + ": duplicate flow id");
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<FlowRequest> load_flows(std::string_view text, const UniversePtr& universe) {
  return flows_from_json(detail::parse_document(text), universe);
}

inline nlohmann::ordered_json flow_to_json(const FlowRequest& f) {
  nlohmann::ordered_json j;
  j["id"] = f.id;
  j["subject"] = f.subject;
  j["object"] = f.object;
  j["mode"] = std::string(to_string(f.mode));
  j["demand"] = format_capacity(f.demand);
  j["categories"] = f.required_categories.universe() ? f.required_categories.names() : std::vector<std::string>{};
  if (f.src_port) j["src_port"] = *f.src_port;
  if (f.dst_port) j["dst_port"] = *f.dst_port;
  return j;
}

inline std::string save_flows(const std::vector<FlowRequest>& flows) {
  nlohmann::ordered_json doc;
  doc["flows"] = nlohmann::ordered_json::array();
  for (const auto& f : flows) doc["flows"].push_back(flow_to_json(f));
  return doc.dump(2) + "\n";
}

/// One entry per input flow, in input order.
inline nlohmann::ordered_json admission_to_json(const std::vector<FlowRequest>& flows, const AdmissionResult& r) {
  nlohmann::ordered_json doc;
  doc["admitted"] = r.admitted.size();
  doc["rejected"] = r.rejected.size();
  auto list = nlohmann::ordered_json::array();
  for (const auto& f : flows) {
    nlohmann::ordered_json j;
    j["id"] = f.id;
    j["verdict"] = "admitted";
    for (const auto& [rf, reason] : r.rejected) {
      if (rf.id == f.id) {
        j["verdict"] = "rejected";
        j["reason"] = std::string(to_string(reason));
      }
    }
    list.push_back(std::move(j));
  }
  doc["flows"] = std::move(list);
  return doc;
}

inline std::string admission_to_csv(const std::vector<FlowRequest>& flows, const AdmissionResult& r) {
  std::ostringstream os;
  os << "flow_id,verdict,reason\n";
  for (const auto& j : admission_to_json(flows, r).at("flows")) {
    os << j.at("id").get<std::string>() << "," << j.at("verdict").get<std::string>() << ","
       << (j.contains("reason") ? j.at("reason").get<std::string>() : "") << "\n";
  }
  return os.str();
}

}  // namespace mlsroute
