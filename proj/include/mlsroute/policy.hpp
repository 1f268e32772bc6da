#pragma once

// Access control (admission of subject/object pairs) and path-level flow
// control for flow requests.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlsroute/topology.hpp"

namespace mlsroute {

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowRequest {
  std::string id;
  std::string subject;
  std::string object;
  ObjectMode mode = ObjectMode::Provider;
  Capacity demand{1};  // covers request and reply traffic
  CategorySet required_categories;
  std::optional<std::uint16_t> src_port;  // transport ports of the subject side, if known
  std::optional<std::uint16_t> dst_port;

  void validate() const {
    if (id.empty()) throw PolicyError("flow id must not be empty");
    if (subject == object) throw PolicyError("flow '" + id + "': subject equals object");
    if (demand <= 0) throw PolicyError("flow '" + id + "': demand must be positive");
  }
};

enum class RejectReason { LevelViolation, CategoryViolation, Incomparable, InvalidRequest };

inline std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::LevelViolation: return "level-violation";
    case RejectReason::CategoryViolation: return "category-violation";
    case RejectReason::Incomparable: return "incomparable";
    case RejectReason::InvalidRequest: return "invalid-request";
  }
  return "invalid-request";
}

struct AccessDecision {
  bool permitted = false;
  std::optional<RejectReason> reason;

  explicit operator bool() const noexcept { return permitted; }
};

struct FlowEndpoints {
  NodeIndex subject;
  NodeIndex object;
};

/// Resolves and role-checks a flow's endpoints. Throws PolicyError.
inline FlowEndpoints resolve_endpoints(const FlowRequest& f, const Topology& t) {
  f.validate();
  const auto s = t.find(f.subject);
  if (!s) throw PolicyError("flow '" + f.id + "': unknown subject '" + f.subject + "'");
  const auto o = t.find(f.object);
  if (!o) throw PolicyError("flow '" + f.id + "': unknown object '" + f.object + "'");
  if (!t.node(*s).can_initiate()) {
    throw PolicyError("flow '" + f.id + "': node '" + f.subject + "' cannot initiate flows");
  }
  if (!t.node(*o).serves(f.mode)) {
    throw PolicyError("flow '" + f.id + "': node '" + f.object + "' is not a " + std::string(to_string(f.mode)) +
                      " object");
  }
  return {*s, *o};
}

/// Access control on the endpoint labels. When both the level and category
/// checks fail and neither label dominates the other, the pair is Incomparable.
inline AccessDecision access_permitted(const FlowRequest& f, const Topology& t) {
  const auto [s, o] = resolve_endpoints(f, t);
  const Label& ls = t.node(s).label;
  const Label& lo = t.node(o).label;
  const bool level_ok = lev(lo.level, ls.level, f.mode) == 1;
  const bool cat_ok = cat(lo.categories, ls.categories, f.mode) == 1;
  if (!level_ok && !cat_ok) {
    return {false, compare_labels(lo, ls) == LabelOrder::Incomparable ? RejectReason::Incomparable
                                                                      : RejectReason::LevelViolation};
  }
  if (!level_ok) return {false, RejectReason::LevelViolation};
  if (!cat_ok) return {false, RejectReason::CategoryViolation};

  // Traffic may only carry categories both endpoints hold.
  if (f.required_categories.universe()) {
    if (!f.required_categories.same_universe(ls.categories)) throw UniverseMismatch();
    if (!f.required_categories.is_subset_of(ls.categories.intersect(lo.categories))) {
      return {false, RejectReason::CategoryViolation};
    }
  }
  return {true, std::nullopt};
}

struct AdmissionResult {
  std::vector<FlowRequest> admitted;
  std::vector<std::pair<FlowRequest, RejectReason>> rejected;
};

/// Partitions flows into the admissible set and rejections, preserving order.
inline AdmissionResult admissible_flows(const std::vector<FlowRequest>& flows, const Topology& t) {
  AdmissionResult result;
  for (const auto& f : flows) {
    AccessDecision d;
    try {
      d = access_permitted(f, t);
    } catch (const PolicyError&) {
      d = {false, RejectReason::InvalidRequest};
    } catch (const LatticeError&) {
      d = {false, RejectReason::InvalidRequest};
    }
    if (d.permitted) {
      result.admitted.push_back(f);
    } else {
      result.rejected.emplace_back(f, *d.reason);
    }
  }
  return result;
}

/// Flow control on a concrete path: every interior node is at or above the
/// flow's originating level and every traversed link has residual >= demand.
/// The path may run subject->object or object->subject.
inline bool flow_control_ok(const Path& path, const FlowRequest& f, const Topology& t, const ResidualLedger& ledger) {
  const auto [s, o] = resolve_endpoints(f, t);
  if (path.size() < 2) throw PolicyError("flow '" + f.id + "': path needs at least two nodes");
  const bool forward = path.front() == s && path.back() == o;
  const bool backward = path.front() == o && path.back() == s;
  if (!forward && !backward) throw PolicyError("flow '" + f.id + "': path does not join its endpoints");
  for (NodeIndex n : path) {
    if (n >= t.node_count()) throw PolicyError("flow '" + f.id + "': path node out of range");
  }

  const SecurityLevel origin = orig(t.level_of(o), t.level_of(s), f.mode);
  bool ok = true;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const auto l = t.link_between(path[k], path[k + 1]);
    if (!l) {
      throw PolicyError("flow '" + f.id + "': no link " + t.node(path[k]).id + "->" + t.node(path[k + 1]).id);
    }
    if (!ledger.fits(t, *l, f.demand)) ok = false;
    if (k > 0 && t.level_of(path[k]) < origin) ok = false;
  }
  return ok;
}

}  // namespace mlsroute
