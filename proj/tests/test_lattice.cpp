#include <gtest/gtest.h>

#include <random>

#include "mlsroute/lattice.hpp"
#include "support/oracles.hpp"

using namespace mlsroute;

namespace {

UniversePtr universe() { return CategoryUniverse::make(CategoryUniverse::default_names()); }

Label label(const UniversePtr& u, int level, std::vector<std::string> cats) {
  return {SecurityLevel(level), CategorySet::from_names(u, cats)};
}

}  // namespace

TEST(SecurityLevel, RejectsNonPositive) {
  EXPECT_THROW(SecurityLevel(0), LatticeError);
  EXPECT_LT(SecurityLevel(1), SecurityLevel(2));
}

TEST(CategoryUniverse, RejectsDuplicatesAndEmptyNames) {
  EXPECT_THROW(CategoryUniverse::make({"TCP", "TCP"}), LatticeError);
  EXPECT_THROW(CategoryUniverse::make({""}), LatticeError);
  std::vector<std::string> many;
  for (int i = 0; i < 65; ++i) many.push_back("c" + std::to_string(i));
  EXPECT_THROW(CategoryUniverse::make(many), LatticeError);
}

TEST(CategorySet, SubsetAndIntersect) {
  const auto u = universe();
  const auto a = CategorySet::from_names(u, {"TCP", "IP"});
  const auto b = CategorySet::from_names(u, {"TCP"});
  EXPECT_TRUE(b.is_subset_of(a));
  EXPECT_FALSE(a.is_subset_of(b));
  EXPECT_EQ(a.intersect(b), b);
  EXPECT_EQ(a.size(), 2u);
  auto c = a;
  EXPECT_THROW(c.insert("QUIC"), LatticeError);
}

TEST(CategorySet, ForeignUniverseIsAnError) {
  const auto a = CategorySet::from_names(universe(), {"TCP"});
  const auto b = CategorySet::from_names(CategoryUniverse::make({"X", "Y"}), {"X"});
  EXPECT_THROW((void)a.is_subset_of(b), UniverseMismatch);
}

TEST(Dominates, Examples) {
  const auto u = universe();
  EXPECT_TRUE(dominates(label(u, 3, {"TCP", "IP"}), label(u, 1, {"TCP"})));
  EXPECT_FALSE(dominates(label(u, 3, {"TCP"}), label(u, 1, {"UDP"})));
  EXPECT_EQ(compare_labels(label(u, 3, {"TCP"}), label(u, 1, {"UDP"})), LabelOrder::Incomparable);
  EXPECT_TRUE(dominates(label(u, 1, {}), label(u, 1, {})));
}

TEST(Dominates, IsAPartialOrder) {
  const auto u = universe();
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> lvl(1, 4);
  std::uniform_int_distribution<std::uint64_t> mask(0, 31);
  auto draw = [&] { return Label{SecurityLevel(lvl(rng)), CategorySet(u, mask(rng))}; };
  for (int i = 0; i < 2000; ++i) {
    const Label a = draw();
    const Label b = draw();
    const Label c = draw();
    EXPECT_TRUE(dominates(a, a));
    if (dominates(a, b) && dominates(b, a)) {
      EXPECT_EQ(a, b);
    }
    if (dominates(a, b) && dominates(b, c)) {
      EXPECT_TRUE(dominates(a, c));
    }
  }
}

TEST(Lev, Examples) {
  EXPECT_EQ(lev(SecurityLevel(2), SecurityLevel(3), ObjectMode::Provider), 1);
  EXPECT_EQ(lev(SecurityLevel(2), SecurityLevel(3), ObjectMode::Both), 0);
  EXPECT_EQ(lev(SecurityLevel(4), SecurityLevel(3), ObjectMode::Receiver), 1);
}

TEST(Cat, Examples) {
  const auto u = universe();
  EXPECT_EQ(cat_term(1, 0, ObjectMode::Provider), 0);
  EXPECT_EQ(cat(CategorySet::from_names(u, {"TCP", "IP"}), CategorySet::from_names(u, {"TCP", "IP"}), ObjectMode::Both),
            1);
  EXPECT_EQ(cat(CategorySet::from_names(u, {"TCP", "UDP"}), CategorySet::from_names(u, {"TCP"}), ObjectMode::Receiver),
            1);
}

TEST(Cat, ArithmeticMatchesSetRelationOnRandomPairs) {
  const auto u = universe();
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint32_t> mask(0, 31);
  for (int i = 0; i < 5000; ++i) {
    const auto mo = mask(rng);
    const auto ms = mask(rng);
    for (auto mode : {ObjectMode::Provider, ObjectMode::Receiver, ObjectMode::Both}) {
      EXPECT_EQ(cat(CategorySet(u, mo), CategorySet(u, ms), mode) == 1,
                oracle::category_relation(oracle::members(mo, 5), oracle::members(ms, 5), mode));
    }
  }
}

TEST(Orig, Examples) {
  EXPECT_EQ(orig(SecurityLevel(4), SecurityLevel(2), ObjectMode::Provider), SecurityLevel(4));
  EXPECT_EQ(orig(SecurityLevel(4), SecurityLevel(2), ObjectMode::Receiver), SecurityLevel(2));
  EXPECT_EQ(orig(SecurityLevel(3), SecurityLevel(3), ObjectMode::Both), SecurityLevel(3));
}

TEST(Conf, Examples) {
  EXPECT_EQ(conf(SecurityLevel(4), SecurityLevel(4), SecurityLevel(2), ObjectMode::Provider), 2);
  EXPECT_EQ(conf(SecurityLevel(4), SecurityLevel(4), SecurityLevel(3), ObjectMode::Provider), 1);
  EXPECT_EQ(conf(SecurityLevel(2), SecurityLevel(2), SecurityLevel(4), ObjectMode::Provider), 0);
}

TEST(ObjectModeText, RoundTrips) {
  for (auto m : {ObjectMode::Provider, ObjectMode::Receiver, ObjectMode::Both}) {
    EXPECT_EQ(parse_object_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_object_mode("sideways"), LatticeError);
}
