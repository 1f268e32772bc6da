#include <gtest/gtest.h>

#include <random>

#include "mlsroute/bench.hpp"
#include "mlsroute/policy_io.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace mlsroute;
using fixture::flow;

namespace {

/// Two hosts joined through one switch, with the given labels.
Topology pair(int ls, std::vector<std::string> cs, int lo, std::vector<std::string> co, ObjectMode object_mode) {
  Topology t;
  Node s = fixture::endpoint("s", ls, NodeRole::Subject);
  s.label.categories = CategorySet::from_names(t.universe(), cs);
  Node o = fixture::endpoint("o", lo, NodeRole::Object);
  o.object_mode = object_mode;
  o.label.categories = CategorySet::from_names(t.universe(), co);
  const auto a = t.add_node(s);
  const auto b = t.add_node(o);
  const auto sw = t.add_node(fixture::endpoint("sw", 4, NodeRole::Forwarder));
  t.add_physical_link(a, sw, Capacity(1));
  t.add_physical_link(sw, b, Capacity(1));
  return t;
}

}  // namespace

TEST(AccessPermitted, Examples) {
  const auto t1 = pair(3, {"ARP", "ICMP", "IP", "TCP", "UDP"}, 1, {"ARP", "IP", "TCP"}, ObjectMode::Provider);
  EXPECT_TRUE(access_permitted(flow("f", "s", "o", ObjectMode::Provider), t1).permitted);

  const auto t2 = pair(1, {"TCP", "UDP"}, 3, {"TCP"}, ObjectMode::Receiver);
  const auto d2 = access_permitted(flow("f", "s", "o", ObjectMode::Receiver), t2);
  EXPECT_FALSE(d2.permitted);
  EXPECT_EQ(d2.reason, RejectReason::CategoryViolation);

  const auto t3 = pair(3, {"TCP"}, 3, {"TCP"}, ObjectMode::Both);
  EXPECT_TRUE(access_permitted(flow("f", "s", "o", ObjectMode::Both), t3).permitted);
}

TEST(AccessPermitted, Reasons) {
  // Provider object above the subject: level check fails only.
  const auto lv = pair(1, {"TCP"}, 3, {"TCP"}, ObjectMode::Provider);
  EXPECT_EQ(access_permitted(flow("f", "s", "o"), lv).reason, RejectReason::LevelViolation);

  // Both checks fail and neither label dominates the other.
  const auto inc = pair(1, {"TCP"}, 3, {"UDP"}, ObjectMode::Provider);
  EXPECT_EQ(access_permitted(flow("f", "s", "o"), inc).reason, RejectReason::Incomparable);

  // Both checks fail but the object dominates the subject.
  const auto dom = pair(1, {"TCP"}, 3, {"TCP", "UDP"}, ObjectMode::Provider);
  EXPECT_EQ(access_permitted(flow("f", "s", "o"), dom).reason, RejectReason::LevelViolation);

  // Required categories beyond what both endpoints hold.
  const auto ok = pair(3, {"TCP", "UDP"}, 1, {"TCP"}, ObjectMode::Provider);
  auto f = flow("f", "s", "o");
  f.required_categories = CategorySet::from_names(ok.universe(), {"UDP"});
  EXPECT_EQ(access_permitted(f, ok).reason, RejectReason::CategoryViolation);
  f.required_categories = CategorySet::from_names(ok.universe(), {"TCP"});
  EXPECT_TRUE(access_permitted(f, ok).permitted);
}

TEST(AccessPermitted, RoleAndLookupErrors) {
  const auto t = pair(3, {"TCP"}, 1, {"TCP"}, ObjectMode::Receiver);
  EXPECT_THROW(access_permitted(flow("f", "s", "o", ObjectMode::Provider), t), PolicyError);
  EXPECT_THROW(access_permitted(flow("f", "sw", "o", ObjectMode::Receiver), t), PolicyError);
  EXPECT_THROW(access_permitted(flow("f", "s", "nobody", ObjectMode::Receiver), t), PolicyError);
  EXPECT_THROW(access_permitted(flow("f", "s", "s"), t), PolicyError);
  EXPECT_THROW(access_permitted(flow("f", "s", "o", ObjectMode::Receiver, Capacity(0)), t), PolicyError);
}

TEST(AdmissibleFlows, PartitionsInOrder) {
  const auto t = pair(2, {"TCP"}, 1, {"TCP"}, ObjectMode::Both);
  EXPECT_TRUE(admissible_flows({}, t).admitted.empty());
  const std::vector<FlowRequest> flows{flow("ok", "s", "o", ObjectMode::Provider),
                                       flow("bad", "s", "o", ObjectMode::Receiver),
                                       flow("ghost", "s", "nobody")};
  const auto r = admissible_flows(flows, t);
  ASSERT_EQ(r.admitted.size(), 1u);
  EXPECT_EQ(r.admitted[0].id, "ok");
  ASSERT_EQ(r.rejected.size(), 2u);
  EXPECT_EQ(r.rejected[0].first.id, "bad");
  EXPECT_EQ(r.rejected[0].second, RejectReason::LevelViolation);
  EXPECT_EQ(r.rejected[1].second, RejectReason::InvalidRequest);
}

TEST(AdmissibleFlows, MatchesPairwiseOracleOnRandomLabels) {
  const Topology t = assign_labels(fat_tree(4, Capacity(1)), 2, 42);
  std::vector<NodeIndex> hosts;
  for (NodeIndex i = 0; i < t.node_count(); ++i) {
    if (t.node(i).role == NodeRole::Endpoint) hosts.push_back(i);
  }
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> pick(0, hosts.size() - 1);
  std::vector<FlowRequest> flows;
  std::size_t expected = 0;
  while (flows.size() < 100) {
    const NodeIndex s = hosts[pick(rng)];
    const NodeIndex o = hosts[pick(rng)];
    if (s == o) continue;
    flows.push_back(flow("f" + std::to_string(flows.size()), t.node(s).id, t.node(o).id));
    const auto& ls = t.node(s).label;
    const auto& lo = t.node(o).label;
    const bool level_ok = lo.level <= ls.level;
    const bool cat_ok = (lo.categories.mask() & ~ls.categories.mask()) == 0;
    if (level_ok && cat_ok) ++expected;
  }
  EXPECT_EQ(admissible_flows(flows, t).admitted.size(), expected);
}

TEST(FlowControl, Examples) {
  const Topology ring = fixture::two_route_ring();
  ResidualLedger ledger(ring);
  const auto f = flow("f", "s", "o");
  const Path top{ring.at("s"), ring.at("t"), ring.at("o")};
  const Path bottom{ring.at("s"), ring.at("b1"), ring.at("b2"), ring.at("b3"), ring.at("o")};
  EXPECT_FALSE(flow_control_ok(top, f, ring, ledger));
  EXPECT_FALSE(flow_control_ok(bottom, f, ring, ledger));

  const Topology low = fixture::two_route_ring(3);
  ResidualLedger low_ledger(low);
  EXPECT_TRUE(flow_control_ok(bottom, f, low, low_ledger));
  EXPECT_TRUE(flow_control_ok(Path(bottom.rbegin(), bottom.rend()), f, low, low_ledger));
  low_ledger.reserve(low, {low.at("b2"), low.at("b3")}, Capacity(10));
  EXPECT_FALSE(flow_control_ok(bottom, f, low, low_ledger));

  Topology direct;
  const auto a = direct.add_node(fixture::endpoint("s", 4));
  const auto b = direct.add_node(fixture::endpoint("o", 4));
  direct.add_physical_link(a, b, Capacity(5));
  EXPECT_TRUE(flow_control_ok({a, b}, f, direct, ResidualLedger(direct)));
  EXPECT_THROW(flow_control_ok({a}, f, direct, ResidualLedger(direct)), PolicyError);
}

TEST(PolicyIo, FlowsRoundTrip) {
  const Topology t = fixture::two_route_ring();
  const auto flows = load_flows(R"({"flows":[
      {"id":"a","subject":"s","object":"o","categories":["TCP","IP"],"src_port":40000,"dst_port":80},
      {"id":"b","subject":"s","object":"o","mode":"both","demand":"0.5"}]})",
                                t.universe());
  ASSERT_EQ(flows.size(), 2u);
  EXPECT_EQ(flows[0].dst_port, 80);
  EXPECT_EQ(flows[1].mode, ObjectMode::Both);
  EXPECT_EQ(flows[1].demand, Capacity(1, 2));
  EXPECT_EQ(save_flows(load_flows(save_flows(flows), t.universe())), save_flows(flows));
}

TEST(PolicyIo, Errors) {
  const auto u = CategoryUniverse::make(CategoryUniverse::default_names());
  EXPECT_THROW(load_flows(R"({"flows":[{"id":"a","subject":"s"}]})", u), ParseError);
  EXPECT_THROW(load_flows(R"({"flows":[{"id":"a","subject":"s","object":"o","mode":"up"}]})", u), ParseError);
  EXPECT_THROW(load_flows(R"({"flows":[{"id":"a","subject":"s","object":"o","demand":"-1"}]})", u), ParseError);
  EXPECT_THROW(load_flows(R"({"flows":[{"id":"a","subject":"s","object":"o","dst_port":70000}]})", u), ParseError);
  EXPECT_THROW(
      load_flows(R"({"flows":[{"id":"a","subject":"s","object":"o"},{"id":"a","subject":"s","object":"o"}]})", u),
      ParseError);
}
