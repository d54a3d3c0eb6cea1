#include <gtest/gtest.h>

#include <random>

#include "infine/errors.hpp"
#include "infine/metrics.hpp"
#include "scenarios.hpp"

namespace infine {
namespace {

Value num(int v) { return Value::number(Decimal::from_int(v)); }

struct Pair {
  Catalog c;
  std::vector<AttrId> x, y;
  RelationInstance L, R;
};

Pair make(std::vector<int> l, std::vector<int> r) {
  Pair p;
  p.x = {p.c.add("L", "k")};
  p.y = {p.c.add("R", "k")};
  std::vector<std::vector<Value>> lr, rr;
  for (int v : l) lr.push_back({num(v)});
  for (int v : r) rr.push_back({num(v)});
  p.L = RelationInstance::from_rows("L", p.x, lr);
  p.R = RelationInstance::from_rows("R", p.y, rr);
  return p;
}

TEST(Coverage, DisjointKeysGiveZero) {
  auto p = make({1, 2, 2}, {3, 4});
  EXPECT_EQ(coverage(p.L, p.R, p.x, p.y, JoinOperator::inner), 0.0);
}

TEST(Coverage, BijectiveKeysGiveOne) {
  auto p = make({1, 2, 3}, {3, 1, 2});
  EXPECT_EQ(coverage(p.L, p.R, p.x, p.y, JoinOperator::inner), 1.0);
}

TEST(Coverage, XyFixtureIsFourThirds) {
  Database db = testing::xy_fixture_db();
  ViewPtr v = testing::xy_fixture_view(db);
  EXPECT_NEAR(coverage(db.get("L"), db.get("R"), v->X, v->Y, JoinOperator::inner), 4.0 / 3.0, 1e-9);
}

TEST(Coverage, HandComputedOperators) {
  auto p = make({1, 2, 2}, {2, 3});
  // inner: L {1: 0/1, 2: 2/2} -> 0.5; R {2: 2/1, 3: 0/1} -> 1
  EXPECT_DOUBLE_EQ(coverage(p.L, p.R, p.x, p.y, JoinOperator::inner), 0.75);
  // left outer keeps L.k = 1 with a null R.k
  EXPECT_DOUBLE_EQ(coverage(p.L, p.R, p.x, p.y, JoinOperator::left_outer), 1.0);
  // full outer adds R.k = 3
  EXPECT_DOUBLE_EQ(coverage(p.L, p.R, p.x, p.y, JoinOperator::full_outer), 1.25);
  EXPECT_DOUBLE_EQ(coverage(p.L, p.R, p.x, p.y, JoinOperator::left_semi), 0.75);
  // right semi keeps R.k = 2 once: L {1: 0, 2: 1/2}, R {2: 1, 3: 0}
  EXPECT_DOUBLE_EQ(coverage(p.L, p.R, p.x, p.y, JoinOperator::right_semi), 0.375);
}

TEST(Coverage, CompositeKeys) {
  Catalog c;
  std::vector<AttrId> l{c.add("L", "a"), c.add("L", "b")}, r{c.add("R", "a"), c.add("R", "b")};
  auto L = RelationInstance::from_rows("L", l, {{num(1), num(1)}, {num(1), num(2)}});
  auto R = RelationInstance::from_rows("R", r, {{num(1), num(1)}, {num(1), num(1)}});
  // L: {(1,1): 2/1, (1,2): 0} -> 1; R: {(1,1): 2/2} -> 1
  EXPECT_DOUBLE_EQ(coverage(L, R, l, r, JoinOperator::inner), 1.0);
}

TEST(Coverage, EmptyKeyProjectionIsAnError) {
  auto p = make({}, {1});
  EXPECT_THROW(coverage(p.L, p.R, p.x, p.y, JoinOperator::inner), ValidationError);
  EXPECT_THROW(coverage(p.R, p.L, p.y, p.x, JoinOperator::inner), ValidationError);
}

TEST(Coverage, SymmetricUnderOperandSwap) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    Catalog c;
    auto L = testing::random_table(rng, c, "L", 2, 1 + rng() % 40, 1 + static_cast<int>(rng() % 8), 0.1);
    auto R = testing::random_table(rng, c, "R", 2, 1 + rng() % 40, 1 + static_cast<int>(rng() % 8), 0.1);
    auto op = static_cast<JoinOperator>(rng() % 6);
    std::vector<AttrId> x{L.schema()[0]}, y{R.schema()[0]};
    EXPECT_NEAR(coverage(L, R, x, y, op), coverage(R, L, y, x, mirrored(op)), 1e-12);
  }
}

}  // namespace
}  // namespace infine
