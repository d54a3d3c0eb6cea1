#include "infine/infine.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "json.hpp"

#include "infine/errors.hpp"

namespace infine {

namespace {

constexpr std::size_t kPartialBudget = 8;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Entry {
  ProvenanceType type;
  const ViewNode* node;
};

using FdMap = std::map<FD, Entry>;

FDSet keys_of(const FdMap& m) {
  FDSet out;
  for (const auto& [fd, e] : m) out.insert(fd);
  return out;
}

ProvenanceSet as_triples(const FDSet& fds, ProvenanceType t, const std::string& subquery) {
  ProvenanceSet out;
  for (const auto& fd : fds) out.push_back({fd, t, subquery});
  return out;
}

// Known FDs that lost minimality because a fresh FD has a smaller lhs.
FDSet survivors(const FDSet& known, const FDSet& fresh) {
  FDSet out;
  for (const auto& d : known) {
    bool dominated = std::any_of(fresh.begin(), fresh.end(), [&](const FD& f) {
      return f.rhs == d.rhs && f.lhs.subset_of(d.lhs) && f.lhs != d.lhs;
    });
    if (!dominated) out.insert(d);
  }
  return out;
}

// FDs of one join operand as seen inside the join result: the operand
// restricted to rows in `keep`, plus an all-null row when `null_row`.
FDSet side_after(const RelationInstance& inst, const std::vector<bool>* keep, bool null_row,
                 const AttrSet& attrs, const FDSet& known, FDSet& fresh, CellMeter* meter) {
  bool filters = keep && std::find(keep->begin(), keep->end(), false) != keep->end();
  fresh.clear();
  if (!filters && !null_row) return known;
  RelationInstance s = filters ? filter_rows(inst, *keep) : inst;
  if (null_row) s = append_null_row(s);
  if (meter) meter->add(s.size(), s.arity());
  if (!null_row) {
    fresh = mine_fds(s, attrs, known);
    FDSet out = survivors(known, fresh);
    out.insert(fresh.begin(), fresh.end());
    return out;
  }
  FDSet all = mine_fds(s, attrs);
  for (const auto& d : all)
    if (!known.count(d)) fresh.insert(d);
  return all;
}

std::vector<AttrSet> next_level(const std::vector<AttrSet>& current, const AttrSet& universe) {
  std::vector<AttrSet> out;
  if (current.size() == 1 && current.front().empty()) {
    universe.for_each([&](AttrId a) { out.push_back(AttrSet::single(a)); });
    return out;
  }
  std::set<AttrSet> members(current.begin(), current.end());
  std::vector<std::vector<AttrId>> ids;
  for (const auto& s : current) ids.push_back(s.ids());
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (!std::equal(ids[i].begin(), ids[i].end() - 1, ids[j].begin())) break;
      AttrSet cand(ids[i].begin(), ids[i].end());
      cand.insert(ids[j].back());
      bool ok = true;
      cand.for_each([&](AttrId a) {
        if (ok && !members.count(cand.without(a))) ok = false;
      });
      if (ok) out.push_back(cand);
    }
  }
  return out;
}

}  // namespace

// ---- naming and output ----

std::string_view type_name(ProvenanceType t) {
  switch (t) {
    case ProvenanceType::base: return "base";
    case ProvenanceType::upstaged_selection: return "upstaged_selection";
    case ProvenanceType::upstaged_left: return "upstaged_left";
    case ProvenanceType::upstaged_right: return "upstaged_right";
    case ProvenanceType::inferred: return "inferred";
    case ProvenanceType::join_fd: return "join_fd";
  }
  return "base";
}

std::optional<ProvenanceType> type_from_name(std::string_view name) {
  for (auto t : {ProvenanceType::base, ProvenanceType::upstaged_selection,
                 ProvenanceType::upstaged_left, ProvenanceType::upstaged_right,
                 ProvenanceType::inferred, ProvenanceType::join_fd}) {
    if (type_name(t) == name) return t;
  }
  return std::nullopt;
}

FDSet fds_of(const ProvenanceSet& triples) {
  FDSet out;
  for (const auto& t : triples) out.insert(t.fd);
  return out;
}

void sort_triples(ProvenanceSet& triples, const Catalog& catalog) {
  auto key = [&](const ProvenanceTriple& t) {
    return std::make_tuple(t.subquery, static_cast<int>(t.type), catalog.qualified(t.fd.rhs),
                           attr_names(t.fd.lhs, catalog));
  };
  std::stable_sort(triples.begin(), triples.end(),
                   [&](const auto& a, const auto& b) { return key(a) < key(b); });
}

std::string triples_to_json(const ProvenanceSet& triples, const Catalog& catalog) {
  ProvenanceSet sorted = triples;
  sort_triples(sorted, catalog);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& t : sorted) {
    nlohmann::ordered_json fd;
    fd["lhs"] = attr_names(t.fd.lhs, catalog);
    fd["rhs"] = catalog.qualified(t.fd.rhs);
    nlohmann::ordered_json j;
    j["fd"] = std::move(fd);
    j["type"] = std::string(type_name(t.type));
    j["subquery"] = t.subquery;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

// ---- typing helpers ----

AttrSet working_attributes(const ViewNode& spec, const Catalog& catalog) {
  return projected_attributes(spec, catalog) | join_attributes(spec);
}

bool single_table(const AttrSet& attrs, const Catalog& catalog) {
  const std::string* table = nullptr;
  bool same = true;
  attrs.for_each([&](AttrId a) {
    const std::string& t = catalog.table_of(a);
    if (!table) table = &t;
    else if (*table != t) same = false;
  });
  return same;
}

FDSet base_sigma(const FDSet& node_fds, const AttrSet& join_attrs, const Catalog& catalog) {
  FDSet out;
  for (const auto& f : node_fds)
    if (single_table(f.attrs(), catalog) || f.attrs().subset_of(join_attrs)) out.insert(f);
  return out;
}

ProvenanceType cross_type(const FD& d, const FDSet& sigma_base, const AttrSet& avail,
                          const AttrSet& join_attrs, const Catalog& catalog) {
  if (closure(d.lhs, sigma_base).contains(d.rhs)) return ProvenanceType::inferred;
  AttrSet others = avail - catalog.table_attrs(catalog.table_of(d.rhs)) - join_attrs;
  if (d.lhs.subset_of(others) && closure(others, sigma_base).contains(d.rhs))
    return ProvenanceType::inferred;
  return ProvenanceType::join_fd;
}

// ---- selection ----

namespace {

ProvenanceSet selection_on(std::size_t child_size, const RelationInstance& filtered,
                           const FDSet& known, const AttrSet& proj,
                           const std::string& subquery) {
  if (filtered.size() >= child_size) return {};
  return as_triples(mine_fds(filtered, proj & filtered.attrs(), known),
                    ProvenanceType::upstaged_selection, subquery);
}

}  // namespace

ProvenanceSet selection_fds(const RelationInstance& view_child, const Predicate& predicate,
                            const ProvenanceSet& known, const AttrSet& proj,
                            const std::string& subquery) {
  RelationInstance filtered = select_rows(view_child, predicate);
  return selection_on(view_child.size(), filtered, fds_of(known), proj, subquery);
}

// ---- join sides ----

JoinSides join_up_fds(const JoinArgs& args, const ProvenanceSet& knownL,
                      const ProvenanceSet& knownR) {
  const RelationInstance& L = *args.left;
  const RelationInstance& R = *args.right;
  JoinOperator op = args.op;
  JoinSides out;
  out.has_left = op != JoinOperator::right_semi;
  out.has_right = op != JoinOperator::left_semi;

  std::optional<std::vector<bool>> lmask, rmask;
  auto left_mask = [&]() -> const std::vector<bool>& {
    if (!lmask) lmask = match_mask(L, args.X, R, args.Y);
    return *lmask;
  };
  auto right_mask = [&]() -> const std::vector<bool>& {
    if (!rmask) rmask = match_mask(R, args.Y, L, args.X);
    return *rmask;
  };
  auto any_unmatched = [](const std::vector<bool>& m) {
    return std::find(m.begin(), m.end(), false) != m.end();
  };

  if (out.has_left) {
    const std::vector<bool>* keep = nullptr;
    bool null_row = false;
    if (op == JoinOperator::inner || op == JoinOperator::left_semi ||
        op == JoinOperator::right_outer)
      keep = &left_mask();
    if (op == JoinOperator::right_outer || op == JoinOperator::full_outer)
      null_row = any_unmatched(right_mask());
    FDSet fresh;
    out.left = side_after(L, keep, null_row, args.proj & L.attrs(), fds_of(knownL), fresh,
                          args.meter);
    auto t = as_triples(fresh, ProvenanceType::upstaged_left, args.subquery);
    out.upstaged.insert(out.upstaged.end(), t.begin(), t.end());
  }
  if (out.has_right) {
    const std::vector<bool>* keep = nullptr;
    bool null_row = false;
    if (op == JoinOperator::inner || op == JoinOperator::right_semi ||
        op == JoinOperator::left_outer)
      keep = &right_mask();
    if (op == JoinOperator::left_outer || op == JoinOperator::full_outer)
      null_row = any_unmatched(left_mask());
    FDSet fresh;
    out.right = side_after(R, keep, null_row, args.proj & R.attrs(), fds_of(knownR), fresh,
                           args.meter);
    auto t = as_triples(fresh, ProvenanceType::upstaged_right, args.subquery);
    out.upstaged.insert(out.upstaged.end(), t.begin(), t.end());
  }
  return out;
}

// ---- join context ----

JoinContext::JoinContext(const JoinArgs& args, const JoinSides& sides)
    : args_(args), sides_(sides) {
  left_avail_ = args.proj & args.left->attrs();
  right_avail_ = args.proj & args.right->attrs();
  xset_ = AttrSet(args.X.begin(), args.X.end());
  yset_ = AttrSet(args.Y.begin(), args.Y.end());
  sigma_ = sides.left;
  sigma_.insert(sides.right.begin(), sides.right.end());
}

FDSet JoinContext::side_fds() const {
  FDSet out = sides_.left;
  out.insert(sides_.right.begin(), sides_.right.end());
  return out;
}

bool JoinContext::side_valid(const AttrSet& lhs, AttrId rhs, bool left) const {
  return implies_fd(left ? sides_.left : sides_.right, FD{lhs, rhs});
}

bool JoinContext::cross(const AttrSet& lhs, AttrId rhs) const {
  AttrSet all = lhs.with(rhs);
  return !all.subset_of(left_avail_) && !all.subset_of(right_avail_);
}

bool JoinContext::eligible(AttrId rhs) const {
  if (args_.op != JoinOperator::inner) return true;
  bool left = left_avail_.contains(rhs);
  AttrSet det = (left ? xset_ : yset_) | (left ? left_avail_ : right_avail_).without(rhs);
  return side_valid(det, rhs, left);
}

void JoinContext::add_found(const FD& fd) { sigma_.insert(fd); }

bool JoinContext::valid(const AttrSet& lhs, AttrId rhs) {
  auto key = std::make_pair(lhs, rhs);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  bool result = [&] {
    AttrSet all = lhs.with(rhs);
    if (all.subset_of(left_avail_)) return side_valid(lhs, rhs, true);
    if (all.subset_of(right_avail_)) return side_valid(lhs, rhs, false);
    if (closure(lhs, sigma_).contains(rhs)) return true;
    bool rhs_left = left_avail_.contains(rhs);
    const AttrSet& own = rhs_left ? left_avail_ : right_avail_;
    const AttrSet& other = rhs_left ? right_avail_ : left_avail_;
    if (lhs.subset_of(other)) {
      // lhs -> rhs would force lhs to determine its closure on its own side.
      AttrSet forced = (closure(all, sigma_) & other) - lhs;
      bool refuted = false;
      forced.for_each([&](AttrId c) {
        if (!refuted && !side_valid(lhs, c, !rhs_left)) refuted = true;
      });
      if (refuted) return false;
    }
    if (args_.op == JoinOperator::inner) {
      AttrSet det = (rhs_left ? xset_ : yset_) | (lhs & own);
      if (!side_valid(det, rhs, rhs_left)) return false;
    }
    return data_check(lhs, rhs);
  }();
  cache_.emplace(key, result);
  return result;
}

const StrippedPartition& JoinContext::wide_partition(const AttrSet& attrs) {
  if (auto it = wide_parts_.find(attrs); it != wide_parts_.end()) return it->second;
  StrippedPartition p;
  if (attrs.size() <= 1) {
    p = build_partition(*wide_, attrs);
  } else {
    auto m = static_cast<AttrId>(attrs.max_id());
    const StrippedPartition& a = wide_partition(attrs.without(m));
    const StrippedPartition& b = wide_partition(AttrSet::single(m));
    p = partition_product(a, b);
  }
  return wide_parts_.emplace(attrs, std::move(p)).first->second;
}

bool JoinContext::data_check(const AttrSet& lhs, AttrId rhs) {
  ++data_checks_;
  const RelationInstance& L = *args_.left;
  const RelationInstance& R = *args_.right;
  AttrSet need = lhs.with(rhs);
  AttrSet lneed = (need & left_avail_) | xset_;
  AttrSet rneed = (need & right_avail_) | yset_;
  if (!wide_) {
    for (const auto& [attrs, inst] : partials_) {
      if ((lneed | rneed).subset_of(attrs)) return fd_holds(inst, FD{lhs, rhs});
    }
    if (partials_.size() >= kPartialBudget) {
      wide_ = join_instances(distinct_project(L, left_avail_ | xset_),
                             distinct_project(R, right_avail_ | yset_), args_.X, args_.Y,
                             args_.op, args_.meter);
    }
  }
  if (wide_) return refines(wide_partition(lhs), wide_->column(rhs));
  RelationInstance partial = join_instances(distinct_project(L, lneed), distinct_project(R, rneed),
                                            args_.X, args_.Y, args_.op, args_.meter);
  bool ok = fd_holds(partial, FD{lhs, rhs});
  partials_.emplace(lneed | rneed, std::move(partial));
  return ok;
}

std::vector<AttrSet> JoinContext::minimal_cross(AttrId rhs, const AttrSet& universe) {
  std::vector<AttrSet> out;
  std::vector<AttrSet> level{AttrSet{}};
  AttrSet pool = universe.without(rhs);
  while (!level.empty()) {
    std::vector<AttrSet> invalid;
    for (const auto& z : level) {
      // z holds an attribute its other members determine: neither z nor
      // any superset can be a minimal lhs.
      bool redundant = false;
      z.for_each([&](AttrId a) {
        if (!redundant && closure(z.without(a), sigma_).contains(a)) redundant = true;
      });
      if (redundant) continue;
      if (valid(z, rhs)) {
        if (cross(z, rhs)) {
          out.push_back(z);
          add_found(FD{z, rhs});
        }
      } else {
        invalid.push_back(z);
      }
    }
    level = invalid.empty() ? std::vector<AttrSet>{} : next_level(invalid, pool);
  }
  return out;
}

ProvenanceSet infer_fds(JoinContext& ctx) {
  const JoinArgs& a = ctx.args();
  AttrSet all = ctx.avail();
  AttrSet keys = a.join_attrs & all;

  FDSet key_fds;
  keys.for_each([&](AttrId c) {
    if (!ctx.eligible(c)) return;
    for (const auto& z : ctx.minimal_cross(c, keys)) key_fds.insert(FD{z, c});
  });
  ctx.key_fds = key_fds;
  FDSet node = ctx.side_fds();
  node.insert(key_fds.begin(), key_fds.end());
  ctx.sigma_base = base_sigma(node, a.join_attrs, *a.catalog);

  FDSet inferred = key_fds;
  all.for_each([&](AttrId c) {
    if (!ctx.eligible(c)) return;
    if (!closure(all.without(c), ctx.sigma_base).contains(c)) return;
    auto zs = ctx.minimal_cross(c, all);
    for (const auto& z : zs) {
      FD d{z, c};
      if (cross_type(d, ctx.sigma_base, all, a.join_attrs, *a.catalog) == ProvenanceType::inferred)
        inferred.insert(d);
    }
    ctx.explored[c] = std::move(zs);
  });
  return as_triples(inferred, ProvenanceType::inferred, a.subquery);
}

ProvenanceSet mine_join_fds(JoinContext& ctx, const ProvenanceSet& inferred) {
  const JoinArgs& a = ctx.args();
  AttrSet all = ctx.avail();
  FDSet skip = fds_of(inferred);
  FDSet found;
  all.for_each([&](AttrId c) {
    if (!ctx.eligible(c)) return;
    auto it = ctx.explored.find(c);
    if (it == ctx.explored.end()) it = ctx.explored.emplace(c, ctx.minimal_cross(c, all)).first;
    for (const auto& z : it->second) {
      FD d{z, c};
      if (!skip.count(d)) found.insert(d);
    }
  });
  return as_triples(found, ProvenanceType::join_fd, a.subquery);
}

// ---- driver ----

namespace {

class Pipeline {
 public:
  Pipeline(const Database& db, const ViewNode& root)
      : db_(db), catalog_(*db.catalog), root_(root) {
    working_ = working_attributes(root, catalog_);
    join_attrs_ = join_attributes(root);
  }

  InfineRun run() {
    NodeOut out = eval(root_, false);
    AttrSet pv = projected_attributes(root_, catalog_);
    InfineRun r;
    for (const auto& [fd, e] : out.fds) {
      if (!fd.attrs().subset_of(pv)) continue;
      r.triples.push_back({fd, e.type, canonical_string(*e.node, catalog_)});
    }
    sort_triples(r.triples, catalog_);
    r.cells = meter_.cells();
    r.data_checks = data_checks_;
    r.times = times_;
    return r;
  }

 private:
  struct NodeOut {
    std::shared_ptr<const RelationInstance> inst;
    AttrSet avail;
    FdMap fds;
  };

  NodeOut eval(const ViewNode& n, bool need_inst) {
    switch (n.kind) {
      case NodeKind::relation: return eval_relation(n);
      case NodeKind::project: return eval_project(n, need_inst);
      case NodeKind::select: return eval_select(n);
      case NodeKind::join: return eval_join(n, need_inst);
    }
    throw Error("unknown node kind");
  }

  NodeOut eval_relation(const ViewNode& n) {
    auto t0 = Clock::now();
    NodeOut out;
    auto it = db_.relations.find(n.relation);
    if (it == db_.relations.end()) throw ValidationError("no instance bound to table " + n.relation);
    out.inst = it->second;
    out.avail = working_ & out.inst->attrs();
    for (const auto& fd : mine_fds(*out.inst, out.avail))
      out.fds.emplace(fd, Entry{ProvenanceType::base, &n});
    times_.base += seconds_since(t0);
    return out;
  }

  NodeOut eval_project(const ViewNode& n, bool need_inst) {
    NodeOut child = eval(*n.left, need_inst);
    NodeOut out;
    out.avail = working_ & n.attrs;
    for (const auto& [fd, e] : child.fds)
      if (fd.attrs().subset_of(out.avail)) out.fds.emplace(fd, e);
    if (need_inst) out.inst = std::make_shared<RelationInstance>(project(*child.inst, n.attrs));
    return out;
  }

  NodeOut eval_select(const ViewNode& n) {
    NodeOut child = eval(*n.left, true);
    auto t0 = Clock::now();
    auto filtered = std::make_shared<RelationInstance>(select_rows(*child.inst, n.predicate));
    NodeOut out;
    out.avail = child.avail;
    if (filtered->size() == child.inst->size()) {
      out.fds = std::move(child.fds);
      out.inst = child.inst;
    } else {
      FDSet known = keys_of(child.fds);
      auto fresh = selection_on(child.inst->size(), *filtered, known, out.avail, "");
      FDSet fresh_set = fds_of(fresh);
      for (const auto& fd : survivors(known, fresh_set)) out.fds.emplace(fd, child.fds.at(fd));
      for (const auto& fd : fresh_set)
        out.fds.emplace(fd, Entry{ProvenanceType::upstaged_selection, &n});
      out.inst = filtered;
    }
    times_.upstage += seconds_since(t0);
    return out;
  }

  NodeOut eval_join(const ViewNode& n, bool need_inst) {
    NodeOut L = eval(*n.left, true);
    NodeOut R = eval(*n.right, true);

    JoinArgs args;
    args.catalog = &catalog_;
    args.left = L.inst.get();
    args.right = R.inst.get();
    args.X = n.X;
    args.Y = n.Y;
    args.op = n.op;
    args.proj = working_;
    args.join_attrs = join_attrs_;
    args.meter = &meter_;

    auto t0 = Clock::now();
    ProvenanceSet knownL, knownR;
    for (const auto& [fd, e] : L.fds) knownL.push_back({fd, e.type, ""});
    for (const auto& [fd, e] : R.fds) knownR.push_back({fd, e.type, ""});
    JoinSides sides = join_up_fds(args, knownL, knownR);
    times_.upstage += seconds_since(t0);

    NodeOut out;
    auto inherit = [&](const FDSet& side, const FdMap& child, ProvenanceType fresh_type) {
      for (const auto& fd : side) {
        auto it = child.find(fd);
        out.fds.emplace(fd, it != child.end() ? it->second : Entry{fresh_type, &n});
      }
    };
    if (sides.has_left) {
      inherit(sides.left, L.fds, ProvenanceType::upstaged_left);
      out.avail |= L.avail;
    }
    if (sides.has_right) {
      inherit(sides.right, R.fds, ProvenanceType::upstaged_right);
      out.avail |= R.avail;
    }

    if (!is_semi(n.op)) {
      JoinContext ctx(args, sides);
      auto t1 = Clock::now();
      ProvenanceSet inferred = infer_fds(ctx);
      times_.infer += seconds_since(t1);
      auto t2 = Clock::now();
      ProvenanceSet joined = mine_join_fds(ctx, inferred);
      times_.mine += seconds_since(t2);
      for (const auto& t : inferred) out.fds.emplace(t.fd, Entry{t.type, &n});
      for (const auto& t : joined) out.fds.emplace(t.fd, Entry{t.type, &n});
      data_checks_ += ctx.data_checks();
    }

    // Multi-table FDs take their type from the highest join they reach.
    FDSet sb = base_sigma(keys_of(out.fds), join_attrs_, catalog_);
    for (auto& [fd, e] : out.fds) {
      if (single_table(fd.attrs(), catalog_)) continue;
      bool fresh_here = e.node == &n;
      if (fresh_here || e.type == ProvenanceType::inferred || e.type == ProvenanceType::join_fd)
        e.type = cross_type(fd, sb, out.avail, join_attrs_, catalog_);
    }

    if (need_inst) {
      auto t3 = Clock::now();
      out.inst = std::make_shared<RelationInstance>(
          join_instances(*L.inst, *R.inst, n.X, n.Y, n.op, &meter_));
      times_.materialize += seconds_since(t3);
    }
    return out;
  }

  const Database& db_;
  const Catalog& catalog_;
  const ViewNode& root_;
  AttrSet working_;
  AttrSet join_attrs_;
  CellMeter meter_;
  StageTimes times_;
  std::uint64_t data_checks_ = 0;
};

}  // namespace

InfineRun run_infine(const Database& db, const ViewNode& spec) {
  validate(spec, *db.catalog);
  return Pipeline(db, spec).run();
}

ProvenanceSet discover(const Database& db, const ViewNode& spec) {
  return run_infine(db, spec).triples;
}

}  // namespace infine
