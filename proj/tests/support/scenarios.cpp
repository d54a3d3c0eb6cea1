#include "scenarios.hpp"

#include <algorithm>

namespace infine::testing {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::vector<AttrId> pick(std::mt19937_64& rng, const AttrSet& from, std::size_t k) {
  std::vector<AttrId> ids = from.ids();
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(std::min(k, ids.size()));
  return ids;
}

ViewPtr maybe_select(std::mt19937_64& rng, const Catalog& catalog, ViewPtr child, int domain,
                     double p) {
  if (!coin(rng, p)) return child;
  AttrSet avail = projected_attributes(*child, catalog);
  Predicate pred;
  int n = uniform(rng, 1, 2);
  for (int i = 0; i < n; ++i) {
    Condition c;
    c.attr = pick(rng, avail, 1).front();
    c.cmp = static_cast<Comparator>(uniform(rng, 0, 5));
    c.constant = Value::number(Decimal::from_int(uniform(rng, 0, domain - 1)));
    pred.conjuncts.push_back(c);
  }
  return make_select(catalog, std::move(pred), std::move(child));
}

ViewPtr random_join(std::mt19937_64& rng, const Catalog& catalog, ViewPtr l, ViewPtr r) {
  auto op = static_cast<JoinOperator>(uniform(rng, 0, 5));
  std::size_t k = coin(rng, 0.2) ? 2 : 1;
  AttrSet la = projected_attributes(*l, catalog);
  AttrSet ra = projected_attributes(*r, catalog);
  k = std::min({k, la.size(), ra.size()});
  return make_join(catalog, op, pick(rng, la, k), pick(rng, ra, k), std::move(l), std::move(r));
}

}  // namespace

RelationInstance random_table(std::mt19937_64& rng, Catalog& catalog, const std::string& name,
                              std::size_t attrs, std::size_t rows, int domain, double null_rate) {
  std::vector<AttrId> schema;
  for (std::size_t a = 0; a < attrs; ++a)
    schema.push_back(catalog.add(name, "c" + std::to_string(a)));
  std::vector<int> dom;
  for (std::size_t a = 0; a < attrs; ++a) dom.push_back(uniform(rng, 1, domain));
  std::vector<std::vector<Value>> data;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<Value> row;
    for (std::size_t a = 0; a < attrs; ++a) {
      if (coin(rng, null_rate)) row.push_back(Value::null());
      else row.push_back(Value::number(Decimal::from_int(uniform(rng, 0, dom[a] - 1))));
    }
    data.push_back(std::move(row));
  }
  return RelationInstance::from_rows(name, schema, data);
}

Scenario random_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Scenario s;
  Catalog& catalog = *s.db.catalog;
  int n_tables = uniform(rng, 2, 3);
  int domain = uniform(rng, 2, 6);
  double null_rate = coin(rng, 0.5) ? 0.0 : 0.1;
  std::vector<ViewPtr> leaves;
  for (int t = 0; t < n_tables; ++t) {
    std::string name = std::string(1, static_cast<char>('A' + t));
    auto attrs = static_cast<std::size_t>(uniform(rng, 2, 6));
    auto rows = static_cast<std::size_t>(uniform(rng, 0, 60));
    if (rows == 0 && !coin(rng, 0.1)) rows = 1 + static_cast<std::size_t>(uniform(rng, 0, 59));
    s.db.add(random_table(rng, catalog, name, attrs, rows, domain, null_rate));
    leaves.push_back(maybe_select(rng, catalog, make_relation(catalog, name), domain, 0.25));
  }
  ViewPtr root;
  if (n_tables == 2) {
    root = random_join(rng, catalog, leaves[0], leaves[1]);
  } else if (coin(rng, 0.5)) {
    auto inner = maybe_select(rng, catalog, random_join(rng, catalog, leaves[0], leaves[1]), domain, 0.2);
    root = random_join(rng, catalog, inner, leaves[2]);
  } else {
    auto inner = maybe_select(rng, catalog, random_join(rng, catalog, leaves[1], leaves[2]), domain, 0.2);
    root = random_join(rng, catalog, leaves[0], inner);
  }
  root = maybe_select(rng, catalog, root, domain, 0.3);
  if (coin(rng, 0.4)) {
    AttrSet avail = projected_attributes(*root, catalog);
    auto keep = pick(rng, avail, static_cast<std::size_t>(uniform(rng, 1, static_cast<int>(avail.size()))));
    root = make_project(catalog, AttrSet(keep.begin(), keep.end()), root);
  }
  s.view = root;
  s.text = canonical_string(*root, catalog);
  return s;
}

ChainPair random_chain(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ChainPair p;
  Catalog& catalog = *p.db.catalog;
  int domain = uniform(rng, 2, 6);
  for (const char* name : {"A", "B", "C"}) {
    auto attrs = static_cast<std::size_t>(uniform(rng, 2, 4));
    auto rows = static_cast<std::size_t>(uniform(rng, 1, 40));
    p.db.add(random_table(rng, catalog, name, attrs, rows, domain, coin(rng, 0.3) ? 0.1 : 0.0));
  }
  auto attr = [&](const char* t, const char* c) { return *catalog.find(t, c); };
  // A.c0 = B.c0 and B.c1 = C.c0
  auto A = make_relation(catalog, "A");
  auto B = make_relation(catalog, "B");
  auto C = make_relation(catalog, "C");
  auto ab = make_join(catalog, JoinOperator::inner, {attr("A", "c0")}, {attr("B", "c0")}, A, B);
  p.first = make_join(catalog, JoinOperator::inner, {attr("B", "c1")}, {attr("C", "c0")}, ab, C);
  auto cb = make_join(catalog, JoinOperator::inner, {attr("C", "c0")}, {attr("B", "c1")}, C, B);
  p.second = make_join(catalog, JoinOperator::inner, {attr("B", "c0")}, {attr("A", "c0")}, cb, A);
  return p;
}

Database xy_fixture_db() {
  Database db;
  auto n = [](int v) { return Value::number(Decimal::from_int(v)); };
  Catalog& c = *db.catalog;
  std::vector<AttrId> ls{c.add("L", "X"), c.add("L", "A")};
  db.add(RelationInstance::from_rows(
      "L", ls, {{n(0), n(0)}, {n(1), n(0)}, {n(1), n(1)}, {n(2), n(2)}}));
  std::vector<AttrId> rs{c.add("R", "Y"), c.add("R", "A'"), c.add("R", "b")};
  db.add(RelationInstance::from_rows(
      "R", rs,
      {{n(0), n(0), n(0)}, {n(1), n(0), n(0)}, {n(1), n(1), n(1)}, {n(2), n(1), n(0)}}));
  return db;
}

ViewPtr xy_fixture_view(const Database& db) {
  const Catalog& c = *db.catalog;
  return make_join(c, JoinOperator::inner, {*c.find("L", "X")}, {*c.find("R", "Y")},
                   make_relation(c, "L"), make_relation(c, "R"));
}

bool pairwise_holds(const RelationInstance& inst, const AttrSet& lhs, AttrId rhs) {
  auto ids = lhs.ids();
  for (std::size_t i = 0; i < inst.size(); ++i) {
    for (std::size_t j = i + 1; j < inst.size(); ++j) {
      bool agree = std::all_of(ids.begin(), ids.end(),
                               [&](AttrId a) { return inst.at(i, a) == inst.at(j, a); });
      if (agree && !(inst.at(i, rhs) == inst.at(j, rhs))) return false;
    }
  }
  return true;
}

FDSet brute_force_fds(const RelationInstance& inst, const AttrSet& attrs) {
  auto ids = attrs.ids();
  std::size_t n = ids.size();
  FDSet out;
  for (AttrId rhs : ids) {
    std::vector<AttrSet> valid;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      AttrSet lhs;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) lhs.insert(ids[i]);
      if (lhs.contains(rhs)) continue;
      if (pairwise_holds(inst, lhs, rhs)) valid.push_back(lhs);
    }
    for (const auto& l : valid) {
      bool minimal = std::none_of(valid.begin(), valid.end(), [&](const AttrSet& o) {
        return o != l && o.subset_of(l);
      });
      if (minimal) out.insert(FD{l, rhs});
    }
  }
  return out;
}

}  // namespace infine::testing
