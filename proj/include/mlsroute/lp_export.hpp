#pragma once

// CPLEX-LP text for the two integer programs, for cross-checking with an
// external solver. Variables: x_<flow>_<i>_<j> (directed link i->j used by the
// flow, node indices) and alpha_<flow>.

#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mlsroute/routing.hpp"

namespace mlsroute {

namespace lp_detail {

inline std::string x(std::size_t f, const Link& l) {
  return "x_" + std::to_string(f) + "_" + std::to_string(l.src) + "_" + std::to_string(l.dst);
}

inline std::string number(const Capacity& c) {
  if (c.denominator() == 1) return std::to_string(c.numerator());
  std::ostringstream os;
  os << std::setprecision(17) << to_double(c);
  return os.str();
}

/// Writes "a + b - c - d"; an all-empty expression writes "0".
inline void expr(std::ostringstream& os, const std::vector<std::string>& plus,
                 const std::vector<std::string>& minus = {}) {
  bool first = true;
  for (const auto& t : plus) {
    os << (first ? " " : " + ") << t;
    first = false;
  }
  for (const auto& t : minus) {
    os << (first ? " -" : " - ") << t;
    first = false;
  }
  if (first) os << " 0";
}

inline std::vector<std::string> vars(const Topology& t, std::size_t f, std::span<const LinkIndex> links) {
  std::vector<std::string> out;
  for (LinkIndex l : links) out.push_back(x(f, t.link(l)));
  return out;
}

/// Flow structure shared by both models. `alpha` is the injection term:
/// the variable alpha_f, or the constant 1 when every flow must be routed.
inline void structure(std::ostringstream& os, const Topology& t, std::size_t f, NodeIndex s, NodeIndex o,
                      const std::string& alpha, bool is_variable) {
  const std::string tag = std::to_string(f);
  // in(s) + alpha = out(s)
  auto plus = vars(t, f, t.in_links(s));
  auto minus = vars(t, f, t.out_links(s));
  if (is_variable) plus.push_back(alpha);
  os << " src_" << tag << ":";
  expr(os, plus, minus);
  os << (is_variable ? " = 0\n" : " = -1\n");

  // As printed, consumption sums the object's outgoing links:
  //   out(o) - alpha = 0
  // The operative rows follow the described semantics instead: the object
  // absorbs the flow (incoming equals alpha) and forwards nothing.
  os << "\\ printed form: out(" << o << ") - " << alpha << " = 0\n";
  plus = vars(t, f, t.in_links(o));
  minus.clear();
  if (is_variable) minus.push_back(alpha);
  os << " dst_" << tag << ":";
  expr(os, plus, minus);
  os << (is_variable ? " = 0\n" : " = 1\n");
  if (!t.out_links(o).empty()) {
    os << " dst_out_" << tag << ":";
    expr(os, vars(t, f, t.out_links(o)));
    os << " = 0\n";
  }

  for (NodeIndex j = 0; j < t.node_count(); ++j) {
    if (j == s || j == o) continue;
    const auto in = vars(t, f, t.in_links(j));
    const auto out = vars(t, f, t.out_links(j));
    if (in.empty() && out.empty()) continue;
    os << " cons_" << tag << "_" << j << ":";
    expr(os, in, out);
    os << " = 0\n";
    if (!in.empty()) {
      os << " once_" << tag << "_" << j << ":";
      expr(os, in);
      os << " <= 1\n";
    }
  }
}

/// Each flow loads a directed link and its reverse twin.
inline void capacity(std::ostringstream& os, const Topology& t, const std::vector<FlowRequest>& flows) {
  for (LinkIndex l = 0; l < t.link_count(); ++l) {
    const Link& link = t.link(l);
    std::vector<std::string> terms;
    for (std::size_t f = 0; f < flows.size(); ++f) {
      const std::string d = number(flows[f].demand);
      terms.push_back(d + " " + x(f, link));
      if (link.twin) terms.push_back(d + " " + x(f, t.link(*link.twin)));
    }
    if (terms.empty()) continue;
    os << " cap_" << link.src << "_" << link.dst << ":";
    expr(os, terms);
    os << " <= " << number(link.capacity) << "\n";
  }
}

inline void binaries(std::ostringstream& os, const Topology& t, std::size_t flows, bool with_alpha) {
  os << "Binary\n";
  for (std::size_t f = 0; f < flows; ++f) {
    if (with_alpha) os << " alpha_" << f << "\n";
    for (const auto& l : t.links()) os << " " << x(f, l) << "\n";
  }
  os << "End\n";
}

}  // namespace lp_detail

/// Flow maximization: maximize the number of admitted flows.
inline std::string export_max_flow_lp(const Topology& t, const std::vector<FlowRequest>& flows) {
  std::ostringstream os;
  os << "\\ policy-compliant flow maximization\n";
  for (std::size_t f = 0; f < flows.size(); ++f) os << "\\ flow " << f << ": " << flows[f].id << "\n";
  os << "Maximize\n obj:";
  std::vector<std::string> alphas;
  for (std::size_t f = 0; f < flows.size(); ++f) alphas.push_back("alpha_" + std::to_string(f));
  lp_detail::expr(os, alphas);
  os << "\nSubject To\n";
  for (std::size_t f = 0; f < flows.size(); ++f) {
    const auto [s, o] = resolve_endpoints(flows[f], t);
    const std::string a = "alpha_" + std::to_string(f);
    lp_detail::structure(os, t, f, s, o, a, true);
    const auto& ls = t.node(s).label;
    const auto& lo = t.node(o).label;
    // Admission: alpha * lev = alpha and alpha * cat = alpha for every category.
    if (lev(lo.level, ls.level, flows[f].mode) == 0 || cat(lo.categories, ls.categories, flows[f].mode) == 0) {
      os << " access_" << f << ": " << a << " = 0\n";
    }
    // Secure flow: x_ij * orig <= x_ij * sigma_j.
    const SecurityLevel origin = orig(lo.level, ls.level, flows[f].mode);
    for (const auto& l : t.links()) {
      if (t.level_of(l.dst) < origin) os << " level_" << f << "_" << l.src << "_" << l.dst << ": " << lp_detail::x(f, l) << " = 0\n";
    }
  }
  lp_detail::capacity(os, t, flows);
  lp_detail::binaries(os, t, flows.size(), true);
  return os.str();
}

/// Conflict minimization over admitted flows. Objective coefficients are
/// gamma^conf for every link; links entering the object contribute the
/// constant 1 per flow, so the LP objective equals the reported cost + |F|.
inline std::string export_min_conflict_lp(const Topology& t, const std::vector<FlowRequest>& flows, int gamma) {
  const ConflictWeights weights(gamma, t.level_count(), t.link_count());
  std::ostringstream os;
  os << "\\ policy conflict minimization, gamma = " << gamma << "\n";
  for (std::size_t f = 0; f < flows.size(); ++f) os << "\\ flow " << f << ": " << flows[f].id << "\n";
  os << "Minimize\n obj:";
  std::vector<std::string> terms;
  for (std::size_t f = 0; f < flows.size(); ++f) {
    const auto [s, o] = resolve_endpoints(flows[f], t);
    for (const auto& l : t.links()) {
      const int c = conf(t.level_of(o), t.level_of(s), t.level_of(l.dst), flows[f].mode);
      terms.push_back(weights.exact(c).str() + " " + lp_detail::x(f, l));
    }
  }
  lp_detail::expr(os, terms);
  os << "\nSubject To\n";
  for (std::size_t f = 0; f < flows.size(); ++f) {
    const auto [s, o] = resolve_endpoints(flows[f], t);
    lp_detail::structure(os, t, f, s, o, "1", false);
  }
  lp_detail::capacity(os, t, flows);
  lp_detail::binaries(os, t, flows.size(), false);
  return os.str();
}

}  // namespace mlsroute
