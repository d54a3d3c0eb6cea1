// Prints one PASS/FAIL line per acceptance criterion; exit status is the
// number of failures.
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <unistd.h>

#include "infine/baseline.hpp"
#include "infine/cli.hpp"
#include "infine/datagen.hpp"
#include "infine/infine.hpp"
#include "infine/metrics.hpp"
#include "scenarios.hpp"

using namespace infine;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

FD fd_of(const Catalog& c, std::vector<std::pair<const char*, const char*>> lhs,
         std::pair<const char*, const char*> rhs) {
  FD d;
  for (auto [t, a] : lhs) d.lhs.insert(*c.find(t, a));
  d.rhs = *c.find(rhs.first, rhs.second);
  return d;
}

std::string show(const FDSet& fds, const Catalog& c) {
  std::string s = "{";
  for (const auto& f : fds) s += (s.size() > 1 ? "; " : "") + render_fd(f, c);
  return s + "}";
}

// ---- 1 ----
Outcome criterion1() {
  Outcome o;
  auto t0 = Clock::now();
  Database db = testing::xy_fixture_db();
  const Catalog& c = *db.catalog;
  const auto& L = db.get("L");
  const auto& R = db.get("R");
  FDSet fr = mine_fds(R, R.attrs());
  FDSet want_r{fd_of(c, {{"R", "Y"}, {"R", "A'"}}, {"R", "b"}),
               fd_of(c, {{"R", "Y"}, {"R", "b"}}, {"R", "A'"})};
  if (fr != want_r) o.fail("fds(R) = " + show(fr, c));
  FDSet fl = mine_fds(L, L.attrs());
  if (!fl.empty()) o.fail("fds(L) = " + show(fl, c));

  ViewPtr view = testing::xy_fixture_view(db);
  RelationInstance j = materialize_view(db, *view);
  std::multiset<std::vector<std::string>> got, want;
  for (std::size_t r = 0; r < j.size(); ++r) {
    std::vector<std::string> row;
    for (const char* col : {"X", "A"}) row.push_back(j.at(r, *c.find("L", col)).payload());
    for (const char* col : {"Y", "A'", "b"}) row.push_back(j.at(r, *c.find("R", col)).payload());
    got.insert(row);
  }
  for (auto row : std::vector<std::vector<std::string>>{{"0", "0", "0", "0", "0"},
                                                        {"1", "0", "1", "0", "0"},
                                                        {"1", "0", "1", "1", "1"},
                                                        {"1", "1", "1", "0", "0"},
                                                        {"1", "1", "1", "1", "1"},
                                                        {"2", "2", "2", "1", "0"}})
    want.insert(row);
  if (j.size() != 6 || got != want) o.fail("join has " + std::to_string(j.size()) + " tuples");

  FD target = fd_of(c, {{"L", "A"}, {"R", "A'"}}, {"R", "b"});
  ProvenanceSet triples = discover(db, *view);
  auto hit = std::find_if(triples.begin(), triples.end(),
                          [&](const ProvenanceTriple& t) { return t.fd == target; });
  if (hit == triples.end()) o.fail("A,A' -> b missing");
  else if (hit->type != ProvenanceType::join_fd)
    o.fail("A,A' -> b typed " + std::string(type_name(hit->type)));

  JoinArgs args;
  args.catalog = &c;
  args.left = &L;
  args.right = &R;
  args.X = view->X;
  args.Y = view->Y;
  args.proj = working_attributes(*view, c);
  args.join_attrs = join_attributes(*view);
  ProvenanceSet kl, kr;
  for (const auto& f : fl) kl.push_back({f, ProvenanceType::base, "L"});
  for (const auto& f : fr) kr.push_back({f, ProvenanceType::base, "R"});
  JoinSides sides = join_up_fds(args, kl, kr);
  JoinContext ctx(args, sides);
  ProvenanceSet inferred = infer_fds(ctx);
  for (const auto& t : inferred)
    if (t.fd == target) o.fail("A,A' -> b produced by the inference stage");

  double secs = elapsed(t0);
  if (secs >= 1.0) o.fail("took " + std::to_string(secs) + " s");
  if (o.ok) o.detail = "6 tuples, A,A' -> b is join_fd";
  return o;
}

std::map<ProvenanceType, std::size_t> type_counts(const ProvenanceSet& ts) {
  std::map<ProvenanceType, std::size_t> m;
  for (const auto& t : ts) ++m[t.type];
  return m;
}

bool is_subtree(const ViewNode& root, const ViewNode& candidate) {
  auto all = subtrees(root);
  return std::any_of(all.begin(), all.end(),
                     [&](const ViewNode* n) { return structurally_equal(*n, candidate); });
}

// ---- 2 and 3 ----
std::pair<Outcome, Outcome> criteria2and3(int count) {
  Outcome o2, o3;
  auto t0 = Clock::now();
  std::map<JoinOperator, int> ops;
  for (int i = 0; i < count; ++i) {
    auto seed = static_cast<std::uint64_t>(1000 + i);
    testing::Scenario s = testing::random_scenario(seed);
    const Catalog& c = *s.db.catalog;
    for (const ViewNode* n : subtrees(*s.view))
      if (n->kind == NodeKind::join) ++ops[n->op];
    ProvenanceSet mine, oracle;
    FDSet base;
    try {
      mine = discover(s.db, *s.view);
      base = oracle_fds(s.db, *s.view);
      oracle = classify_provenance(s.db, *s.view);
    } catch (const std::exception& e) {
      o2.fail("seed " + std::to_string(seed) + " threw: " + e.what());
      o3.fail("seed " + std::to_string(seed) + " threw");
      continue;
    }
    FDSet got = fds_of(mine);
    if (!equivalent(got, base))
      o2.fail("seed " + std::to_string(seed) + " " + s.text + ": infine " + show(got, c) +
              " oracle " + show(base, c));
    if (got.size() != mine.size())
      o3.fail("seed " + std::to_string(seed) + ": several triples for one FD");
    if (type_counts(mine) != type_counts(oracle)) {
      std::string diff;
      std::map<FD, const ProvenanceTriple*> by_fd;
      for (const auto& t : oracle) by_fd[t.fd] = &t;
      for (const auto& t : mine) {
        auto it = by_fd.find(t.fd);
        if (it == by_fd.end()) diff += " [" + render_fd(t.fd, c) + " not in oracle]";
        else if (it->second->type != t.type)
          diff += " [" + render_fd(t.fd, c) + " " + std::string(type_name(t.type)) + " vs " +
                  std::string(type_name(it->second->type)) + "]";
      }
      o3.fail("seed " + std::to_string(seed) + " " + s.text + ":" + diff);
    }
    for (const auto& t : mine) {
      try {
        ViewPtr sub = parse_view(t.subquery, c);
        if (!is_subtree(*s.view, *sub)) o3.fail("subquery not in tree: " + t.subquery);
      } catch (const std::exception& e) {
        o3.fail("subquery does not parse: " + t.subquery);
      }
    }
  }
  double secs = elapsed(t0);
  if (ops.size() != 6) o2.fail("not every join operator was exercised");
  if (secs >= 300) o2.fail("took " + std::to_string(secs) + " s");
  if (o2.ok) o2.detail = std::to_string(count) + " scenarios in " + std::to_string(secs) + " s";
  if (o3.ok) o3.detail = std::to_string(count) + " scenarios";
  return {o2, o3};
}

// ---- 4 ----
Outcome criterion4(int count) {
  Outcome o;
  auto by_type = [](const ProvenanceSet& ts, std::initializer_list<ProvenanceType> types) {
    FDSet out;
    for (const auto& t : ts)
      if (std::find(types.begin(), types.end(), t.type) != types.end()) out.insert(t.fd);
    return out;
  };
  for (int i = 0; i < count; ++i) {
    auto seed = static_cast<std::uint64_t>(5000 + i);
    testing::ChainPair p = testing::random_chain(seed);
    ProvenanceSet a = discover(p.db, *p.first);
    ProvenanceSet b = discover(p.db, *p.second);
    std::string tag = "seed " + std::to_string(seed) + ": ";
    if (!equivalent(fds_of(a), fds_of(b))) o.fail(tag + "total FD sets differ");
    for (auto t : {ProvenanceType::inferred, ProvenanceType::join_fd})
      if (!equivalent(by_type(a, {t}), by_type(b, {t})))
        o.fail(tag + std::string(type_name(t)) + " sets differ");
    auto up = {ProvenanceType::upstaged_left, ProvenanceType::upstaged_right};
    if (!equivalent(by_type(a, up), by_type(b, up))) o.fail(tag + "upstaged sets differ");
  }
  if (o.ok) o.detail = std::to_string(count) + " chains";
  return o;
}

// ---- 5 ----
double brute_coverage(const RelationInstance& L, const RelationInstance& R, AttrId x, AttrId y) {
  std::vector<std::pair<Value, Value>> join;  // key values of each joined pair
  for (std::size_t i = 0; i < L.size(); ++i)
    for (std::size_t j = 0; j < R.size(); ++j)
      if (L.at(i, x) == R.at(j, y)) join.emplace_back(L.at(i, x), R.at(j, y));
  auto side = [&](const RelationInstance& I, AttrId a, bool left) {
    std::vector<Value> distinct;
    for (std::size_t r = 0; r < I.size(); ++r)
      if (std::find(distinct.begin(), distinct.end(), I.at(r, a)) == distinct.end())
        distinct.push_back(I.at(r, a));
    double sum = 0;
    for (const auto& v : distinct) {
      double in_join = 0, in_inst = 0;
      for (const auto& jr : join) in_join += (left ? jr.first : jr.second) == v;
      for (std::size_t r = 0; r < I.size(); ++r) in_inst += I.at(r, a) == v;
      sum += in_join / in_inst;
    }
    return sum / static_cast<double>(distinct.size());
  };
  return 0.5 * (side(L, x, true) + side(R, y, false));
}

Outcome criterion5() {
  Outcome o;
  auto num = [](int v) { return Value::number(Decimal::from_int(v)); };
  {
    Catalog c;
    std::vector<AttrId> ls{c.add("L", "k")}, rs{c.add("R", "k")};
    auto L = RelationInstance::from_rows("L", ls, {{num(1)}, {num(2)}});
    auto R = RelationInstance::from_rows("R", rs, {{num(3)}, {num(4)}});
    if (coverage(L, R, ls, rs, JoinOperator::inner) != 0.0) o.fail("disjoint keys not 0");
    auto R2 = RelationInstance::from_rows("R", rs, {{num(2)}, {num(1)}});
    if (coverage(L, R2, ls, rs, JoinOperator::inner) != 1.0) o.fail("bijective keys not 1");
  }
  {
    Database db = testing::xy_fixture_db();
    ViewPtr v = testing::xy_fixture_view(db);
    double cv = coverage(db.get("L"), db.get("R"), v->X, v->Y, JoinOperator::inner);
    if (std::abs(cv - 4.0 / 3.0) > 1e-9) o.fail("fixture coverage " + std::to_string(cv));
  }
  std::mt19937_64 rng(77);
  for (int i = 0; i < 50; ++i) {
    Catalog c;
    auto rows_l = std::uniform_int_distribution<std::size_t>(1, 120)(rng);
    auto rows_r = std::uniform_int_distribution<std::size_t>(1, 120)(rng);
    int domain = std::uniform_int_distribution<int>(1, 15)(rng);
    auto L = testing::random_table(rng, c, "L", 2, rows_l, domain, 0.05);
    auto R = testing::random_table(rng, c, "R", 2, rows_r, domain, 0.05);
    AttrId x = L.schema()[0], y = R.schema()[0];
    double fast = coverage(L, R, {x}, {y}, JoinOperator::inner);
    double slow = brute_coverage(L, R, x, y);
    double swapped = coverage(R, L, {y}, {x}, JoinOperator::inner);
    if (std::abs(fast - slow) > 1e-9 || std::abs(fast - swapped) > 1e-9)
      o.fail("instance " + std::to_string(i) + ": " + std::to_string(fast) + " vs " +
             std::to_string(slow));
  }
  if (o.ok) o.detail = "fixed cases and 50 brute-force instances";
  return o;
}

// ---- 6 ----
Outcome criterion6() {
  Outcome o;
  GenSpec spec;
  spec.seed = 6;
  spec.key_multiplicity = 20;
  spec.key_overlap = 1.0;
  TableGen t0;
  t0.attr_count = 1;
  t0.tuple_count = 200;
  t0.distinct_ratio = {1.0};
  t0.planted = {{"k0", 1.0}};
  TableGen t1;
  t1.attr_count = 3;
  t1.tuple_count = 4000;
  t1.distinct_ratio = {1.0, 0.05, 0.02};
  t1.planted = {{"k0", 0.2}};
  spec.tables = {t0, t1};
  Generated g = generate(spec);
  double cov = g.links.front().coverage;
  if (!(cov > 5)) o.fail("coverage " + std::to_string(cov));
  ViewPtr view = parse_view(chain_view(g), *g.db.catalog);

  // warm-up, then averaged timings
  compare(g.db, *view, 1);
  ComparisonReport r = compare(g.db, *view, 5);
  if (r.accuracy != 1.0 || !r.only_infine.empty()) o.fail("FD sets differ");
  if (r.type_counts.count("join_fd")) o.fail("scenario needs the mining stage");
  double ratio = static_cast<double>(r.cells_materialized_infine) /
                 static_cast<double>(r.cells_materialized_baseline);
  if (!(ratio < 0.25)) o.fail("cell ratio " + std::to_string(ratio));
  double ti = r.timings["infine.total"], tb = r.timings["baseline.total"];
  if (!(ti <= tb)) o.fail("infine " + std::to_string(ti) + " s vs baseline " + std::to_string(tb) + " s");
  std::ostringstream os;
  os << "coverage " << cov << ", cells " << r.cells_materialized_infine << " vs "
     << r.cells_materialized_baseline << ", time " << ti << " s vs " << tb << " s";
  if (o.ok) o.detail = os.str();
  else o.detail += " (" + os.str() + ")";
  return o;
}

// ---- 7 ----
Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(7);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int i = 0; i < 1000; ++i) {
    Catalog c;
    auto attrs = static_cast<std::size_t>(uni(2, 6));
    auto rows = static_cast<std::size_t>(uni(0, 200));
    auto inst = testing::random_table(rng, c, "T", attrs, rows, uni(1, 30), uni(0, 1) ? 0.05 : 0.0);
    FD d;
    d.rhs = inst.schema()[static_cast<std::size_t>(uni(0, static_cast<int>(attrs) - 1))];
    for (AttrId a : inst.schema())
      if (a != d.rhs && uni(0, 2) == 0) d.lhs.insert(a);
    if (fd_holds(inst, d) != testing::pairwise_holds(inst, d.lhs, d.rhs))
      o.fail("fd_holds disagrees on pair " + std::to_string(i));
  }
  for (int i = 0; i < 400; ++i) {
    Catalog c;
    auto attrs = static_cast<std::size_t>(uni(1, 5));
    auto rows = static_cast<std::size_t>(uni(0, 30));
    auto inst = testing::random_table(rng, c, "T", attrs, rows, uni(1, 5), uni(0, 1) ? 0.1 : 0.0);
    FDSet mined = mine_fds(inst, inst.attrs());
    FDSet exact = testing::brute_force_fds(inst, inst.attrs());
    if (mined != exact) {
      o.fail("miner differs on instance " + std::to_string(i) + ": " + show(mined, c) + " vs " +
             show(exact, c));
      continue;
    }
    for (const auto& f : mined) {
      if (!testing::pairwise_holds(inst, f.lhs, f.rhs)) o.fail("mined FD does not hold");
      f.lhs.for_each([&](AttrId a) {
        if (testing::pairwise_holds(inst, f.lhs.without(a), f.rhs)) o.fail("mined FD not minimal");
      });
    }
    if (!implies_all(mined, exact)) o.fail("miner incomplete");
  }
  if (o.ok) o.detail = "1000 validation pairs, 400 mined instances";
  return o;
}

// ---- 8 ----
Outcome criterion8() {
  Outcome o;
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("infine_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  std::ostringstream sink, err;
  int rc = run_cli({"gen", "--out", dir.string(), "--tables", "3", "--rows", "40", "--attrs", "2",
                    "--ratio", "0.3", "--multiplicity", "2", "--seed", "8"},
                   sink, err);
  if (rc != 0) {
    o.fail("gen failed: " + err.str());
    return o;
  }
  std::string view = "select[T1.a0 != 'a'](T0 join[T0.k0 = T1.k0] T1) ljoin[T1.k1 = T2.k1] T2";
  auto run = [&](const std::string& name) {
    std::ostringstream out, e;
    std::vector<std::string> args{"discover", "--view", view, "--format", "json", "--out",
                                  (dir / name).string()};
    for (const char* t : {"T0", "T1", "T2"})
      args.push_back("--table=" + std::string(t) + "=" + (dir / (std::string(t) + ".csv")).string());
    int code = run_cli(args, out, e);
    if (code != 0) o.fail("discover failed: " + e.str());
    std::ifstream in(dir / name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string a = run("a.json"), b = run("b.json");
  if (a.empty() || a != b) o.fail("outputs differ");
  fs::remove_all(dir);
  if (o.ok) o.detail = std::to_string(a.size()) + " identical bytes";
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int n, const char* what, const Outcome& o) {
    std::cout << (o.ok ? "[PASS]" : "[FAIL]") << " criterion " << n << ": " << what;
    if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
    std::cout << std::endl;
    if (!o.ok) ++failures;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      Outcome o;
      o.fail(std::string("exception: ") + e.what());
      return o;
    }
  };
  report(1, "two-table join_fd fixture", guarded(criterion1));
  auto [c2, c3] = criteria2and3(600);
  report(2, "oracle equivalence", c2);
  report(3, "provenance fidelity", c3);
  report(4, "join-order invariance", guarded([] { return criterion4(150); }));
  report(5, "coverage metric", guarded(criterion5));
  report(6, "partial materialization", guarded(criterion6));
  report(7, "miner oracle", guarded(criterion7));
  report(8, "determinism", guarded(criterion8));
  return failures;
}
