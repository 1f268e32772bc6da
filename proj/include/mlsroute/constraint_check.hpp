#pragma once

// Post-hoc verifier for exact and heuristic assignments. Works directly on the
// link-usage variables x[f][link] and alpha[f], and re-derives every label
// relation from raw levels and category masks instead of calling the policy
// functions the solvers use.

#include <map>
#include <string>
#include <vector>

#include "mlsroute/exact.hpp"

namespace mlsroute {

/// x[f] as a set of directed links plus the admission bit.
struct FlowVariables {
  bool alpha = false;
  std::vector<LinkIndex> links;
};

inline std::vector<FlowVariables> variables_from_paths(const Topology& t, const std::vector<Path>& paths) {
  std::vector<FlowVariables> out;
  for (const auto& p : paths) {
    FlowVariables v;
    v.alpha = !p.empty();
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
      const auto l = t.link_between(p[k], p[k + 1]);
      if (!l) throw RoutingError("path uses a missing link");
      v.links.push_back(*l);
    }
    out.push_back(std::move(v));
  }
  return out;
}

inline std::vector<FlowVariables> variables_from_solution(const Topology& t, const ExactSolution& sol) {
  std::vector<Path> paths;
  for (const auto& a : sol.flows) paths.push_back(a.alpha ? a.path : Path{});
  return variables_from_paths(t, paths);
}

namespace check_detail {

struct Ends {
  NodeIndex s;
  NodeIndex o;
};

inline int origin_level(int so, int ss, ObjectMode m) { return m == ObjectMode::Receiver ? ss : so; }

inline bool level_rule(int so, int ss, ObjectMode m) {
  if (m == ObjectMode::Provider) return so <= ss;
  if (m == ObjectMode::Receiver) return so >= ss;
  return so == ss;
}

inline bool category_rule(std::uint64_t co, std::uint64_t cs, ObjectMode m) {
  if (m == ObjectMode::Provider) return (co & ~cs) == 0;
  if (m == ObjectMode::Receiver) return (cs & ~co) == 0;
  return co == cs;
}

/// Path structure: s emits alpha and receives nothing, o absorbs alpha and
/// emits nothing, interior nodes conserve, every node is entered at most once,
/// and the used links form a single s->o chain.
inline void check_structure(const Topology& t, const std::string& fid, Ends e, const FlowVariables& v,
                            std::vector<std::string>& errs) {
  const std::size_t n = t.node_count();
  std::vector<int> in(n, 0);
  std::vector<int> out(n, 0);
  std::vector<LinkIndex> next(n, t.link_count());
  for (LinkIndex l : v.links) {
    if (l >= t.link_count()) {
      errs.push_back(fid + ": link index out of range");
      return;
    }
    in[t.link(l).dst] += 1;
    out[t.link(l).src] += 1;
    next[t.link(l).src] = l;
  }
  const int a = v.alpha ? 1 : 0;
  if (in[e.s] != 0) errs.push_back(fid + ": flow enters its subject");
  if (out[e.s] != a) errs.push_back(fid + ": subject outflow != alpha");
  if (in[e.o] != a) errs.push_back(fid + ": object inflow != alpha");
  if (out[e.o] != 0) errs.push_back(fid + ": flow leaves its object");
  for (NodeIndex j = 0; j < n; ++j) {
    if (in[j] > 1) errs.push_back(fid + ": node " + t.node(j).id + " entered more than once");
    if (j != e.s && j != e.o && in[j] != out[j]) {
      errs.push_back(fid + ": conservation fails at " + t.node(j).id);
    }
  }
  if (!v.alpha) {
    if (!v.links.empty()) errs.push_back(fid + ": links used by an unrouted flow");
    return;
  }
  std::size_t walked = 0;
  NodeIndex u = e.s;
  while (u != e.o && walked <= v.links.size()) {
    if (next[u] == t.link_count()) break;
    u = t.link(next[u]).dst;
    ++walked;
  }
  if (u != e.o || walked != v.links.size()) errs.push_back(fid + ": used links are not a single s-o path");
}

inline void check_capacity(const Topology& t, const std::vector<FlowRequest>& flows,
                           const std::vector<FlowVariables>& vars, std::vector<std::string>& errs) {
  std::vector<Capacity> load(t.link_count(), Capacity(0));
  for (std::size_t f = 0; f < flows.size(); ++f) {
    for (LinkIndex l : vars[f].links) {
      load[l] += flows[f].demand;
      if (const auto& tw = t.link(l).twin) load[*tw] += flows[f].demand;
    }
  }
  for (LinkIndex l = 0; l < t.link_count(); ++l) {
    if (load[l] > t.link(l).capacity) {
      errs.push_back("capacity exceeded on " + t.node(t.link(l).src).id + "->" + t.node(t.link(l).dst).id);
    }
  }
}

}  // namespace check_detail

/// Violations of the flow-maximization model; empty when the assignment is valid.
/// When `claimed_objective` is given it must equal the number of admitted flows.
inline std::vector<std::string> check_max_flow_assignment(const Topology& t, const std::vector<FlowRequest>& flows,
                                                          const std::vector<FlowVariables>& vars,
                                                          std::optional<Cost> claimed_objective = std::nullopt) {
  std::vector<std::string> errs;
  if (vars.size() != flows.size()) return {"variable count does not match flow count"};
  int admitted = 0;
  for (std::size_t f = 0; f < flows.size(); ++f) {
    const auto& fl = flows[f];
    const auto s = t.find(fl.subject);
    const auto o = t.find(fl.object);
    if (!s || !o) {
      errs.push_back(fl.id + ": unknown endpoint");
      continue;
    }
    check_detail::check_structure(t, fl.id, {*s, *o}, vars[f], errs);
    if (!vars[f].alpha) continue;
    ++admitted;
    const auto& ls = t.node(*s).label;
    const auto& lo = t.node(*o).label;
    if (!check_detail::level_rule(lo.level.value(), ls.level.value(), fl.mode)) {
      errs.push_back(fl.id + ": admitted against the level rule");
    }
    if (!check_detail::category_rule(lo.categories.mask(), ls.categories.mask(), fl.mode)) {
      errs.push_back(fl.id + ": admitted against the category rule");
    }
    const int origin = check_detail::origin_level(lo.level.value(), ls.level.value(), fl.mode);
    for (LinkIndex l : vars[f].links) {
      if (origin > t.node(t.link(l).dst).label.level.value()) {
        errs.push_back(fl.id + ": enters " + t.node(t.link(l).dst).id + " below the originating level");
      }
    }
  }
  check_detail::check_capacity(t, flows, vars, errs);
  if (claimed_objective && *claimed_objective != Cost(admitted)) {
    errs.push_back("claimed objective does not equal the number of routed flows");
  }
  return errs;
}

/// Violations of the conflict-minimization model. Every flow must be routed;
/// the recomputed objective (gamma^severity over interior nodes) must match.
inline std::vector<std::string> check_min_conflict_assignment(const Topology& t, const std::vector<FlowRequest>& flows,
                                                              const std::vector<FlowVariables>& vars, int gamma,
                                                              std::optional<Cost> claimed_objective = std::nullopt) {
  std::vector<std::string> errs;
  if (vars.size() != flows.size()) return {"variable count does not match flow count"};
  Cost total = 0;
  for (std::size_t f = 0; f < flows.size(); ++f) {
    const auto& fl = flows[f];
    const auto s = t.find(fl.subject);
    const auto o = t.find(fl.object);
    if (!s || !o) {
      errs.push_back(fl.id + ": unknown endpoint");
      continue;
    }
    if (!vars[f].alpha) errs.push_back(fl.id + ": flow left unrouted");
    check_detail::check_structure(t, fl.id, {*s, *o}, vars[f], errs);
    const int origin = check_detail::origin_level(t.node(*o).label.level.value(), t.node(*s).label.level.value(),
                                                  fl.mode);
    for (LinkIndex l : vars[f].links) {
      const NodeIndex j = t.link(l).dst;
      if (j == *o) continue;
      const int lj = t.node(j).label.level.value();
      Cost term = 1;
      for (int k = 0; k < std::max(0, origin - lj); ++k) term *= gamma;
      total += term;
    }
  }
  check_detail::check_capacity(t, flows, vars, errs);
  if (claimed_objective && *claimed_objective != total) {
    errs.push_back("claimed objective " + claimed_objective->str() + " != recomputed " + total.str());
  }
  return errs;
}

}  // namespace mlsroute
