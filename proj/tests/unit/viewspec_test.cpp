#include <gtest/gtest.h>

#include "infine/errors.hpp"
#include "infine/viewspec.hpp"
#include "scenarios.hpp"

namespace infine {
namespace {

class ViewFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    for (const char* a : {"id", "name", "age"}) c.add("P", a);
    for (const char* a : {"pid", "ward"}) c.add("A", a);
    for (const char* a : {"ward", "floor"}) c.add("W", a);
  }
  AttrId id(const char* t, const char* a) { return *c.find(t, a); }
  Catalog c;
};

TEST_F(ViewFixture, ParsesNestedExpression) {
  auto v = parse_view(
      "project[P.name, ward](select[age >= 30 and P.name <> 'x'](P) join[P.id = A.pid] A)", c);
  ASSERT_EQ(v->kind, NodeKind::project);
  EXPECT_EQ(v->attrs, (AttrSet{id("P", "name"), id("A", "ward")}));
  const ViewNode& j = v->child();
  ASSERT_EQ(j.kind, NodeKind::join);
  EXPECT_EQ(j.op, JoinOperator::inner);
  EXPECT_EQ(j.X, std::vector<AttrId>{id("P", "id")});
  EXPECT_EQ(j.Y, std::vector<AttrId>{id("A", "pid")});
  ASSERT_EQ(j.left->kind, NodeKind::select);
  ASSERT_EQ(j.left->predicate.conjuncts.size(), 2u);
  EXPECT_EQ(j.left->predicate.conjuncts[1].cmp, Comparator::ne);
  EXPECT_EQ(j.left->predicate.conjuncts[1].constant, Value::text("x"));
}

TEST_F(ViewFixture, SwappedJoinPairIsOriented) {
  auto v = parse_view("P ljoin[A.pid = P.id] A", c);
  EXPECT_EQ(v->X, std::vector<AttrId>{id("P", "id")});
  EXPECT_EQ(v->Y, std::vector<AttrId>{id("A", "pid")});
  EXPECT_EQ(v->op, JoinOperator::left_outer);
}

TEST_F(ViewFixture, ReportsErrors) {
  EXPECT_THROW(parse_view("Q", c), ValidationError);
  EXPECT_THROW(parse_view("project[P.nope](P)", c), ValidationError);
  EXPECT_THROW(parse_view("project[ward]((P join[P.id = A.pid] A) join[A.ward = W.ward] W)", c),
               ValidationError);
  EXPECT_THROW(parse_view("P join[P.id = A.pid A", c), ParseError);
  EXPECT_THROW(parse_view("P join[P.id = A.pid] A extra", c), ParseError);
  EXPECT_THROW(parse_view("P join[P.id = P.age] P", c), ValidationError);
  EXPECT_THROW(parse_view("project[A.ward](P lsemi[P.id = A.pid] A)", c), ValidationError);
  EXPECT_THROW(parse_view("select[age = 'x' and](P)", c), ParseError);
}

TEST_F(ViewFixture, ProjectedAttributes) {
  auto semi = parse_view("P rsemi[P.id = A.pid] A", c);
  EXPECT_EQ(projected_attributes(*semi, c), c.table_attrs("A"));
  auto full = parse_view("(P join[P.id = A.pid] A) fjoin[A.ward = W.ward] W", c);
  EXPECT_EQ(projected_attributes(*full, c), c.table_attrs("P") | c.table_attrs("A") | c.table_attrs("W"));
  EXPECT_EQ(join_attributes(*full), (AttrSet{id("P", "id"), id("A", "pid"), id("A", "ward"), id("W", "ward")}));
  EXPECT_EQ(referenced_tables(*full), (std::vector<std::string>{"P", "A", "W"}));
  EXPECT_EQ(subtrees(*full).size(), 5u);
}

TEST_F(ViewFixture, CanonicalStringIsStable) {
  auto v = parse_view("project[ward, P.name](select[age < 3.50](P) join[id = pid] A)", c);
  std::string s = canonical_string(*v, c);
  EXPECT_EQ(s, "project[P.name, A.ward](select[P.age < 3.5](P) join[P.id = A.pid] A)");
  auto again = parse_view(s, c);
  EXPECT_TRUE(structurally_equal(*v, *again));
  EXPECT_EQ(canonical_string(*again, c), s);
}

TEST_F(ViewFixture, QuotesUnusualIdentifiersAndStrings) {
  Catalog odd;
  odd.add("my table", "select");
  odd.add("T2", "x");
  auto v = parse_view("select[`my table`.`select` = 'it''s'](`my table`) join[`select` = x] T2", odd);
  std::string s = canonical_string(*v, odd);
  EXPECT_EQ(s, "select[`my table`.`select` = 'it''s'](`my table`) join[`my table`.`select` = T2.x] T2");
  EXPECT_TRUE(structurally_equal(*v, *parse_view(s, odd)));
}

TEST(ViewRoundTrip, RandomScenariosReparse) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto s = testing::random_scenario(seed);
    auto back = parse_view(s.text, *s.db.catalog);
    EXPECT_TRUE(structurally_equal(*s.view, *back)) << s.text;
    EXPECT_EQ(canonical_string(*back, *s.db.catalog), s.text);
  }
}

}  // namespace
}  // namespace infine
