#include "infine/baseline.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "infine/errors.hpp"

namespace infine {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class Evaluator {
 public:
  Evaluator(const Database& db, CellMeter* meter) : db_(db), meter_(meter) {}

  const RelationInstance& eval(const ViewNode& n) {
    if (auto it = memo_.find(&n); it != memo_.end()) return it->second;
    RelationInstance out;
    switch (n.kind) {
      case NodeKind::relation: out = db_.get(n.relation); break;
      case NodeKind::project: out = project(eval(*n.left), n.attrs); break;
      case NodeKind::select: out = select_rows(eval(*n.left), n.predicate); break;
      case NodeKind::join:
        out = join_instances(eval(*n.left), eval(*n.right), n.X, n.Y, n.op, meter_);
        break;
    }
    return memo_.emplace(&n, std::move(out)).first->second;
  }

 private:
  const Database& db_;
  CellMeter* meter_;
  std::unordered_map<const ViewNode*, RelationInstance> memo_;
};

}  // namespace

RelationInstance materialize_view(const Database& db, const ViewNode& spec, CellMeter* meter) {
  validate(spec, *db.catalog);
  Evaluator ev(db, meter);
  return ev.eval(spec);
}

FDSet oracle_fds(const Database& db, const ViewNode& spec) {
  RelationInstance view = materialize_view(db, spec);
  return mine_fds(view, projected_attributes(spec, *db.catalog));
}

ProvenanceSet classify_provenance(const Database& db, const ViewNode& spec) {
  const Catalog& catalog = *db.catalog;
  validate(spec, catalog);
  AttrSet working = working_attributes(spec, catalog);
  AttrSet join_attrs = join_attributes(spec);
  Evaluator ev(db, nullptr);

  std::unordered_map<const ViewNode*, AttrSet> avail;
  std::unordered_map<const ViewNode*, FDSet> fds;
  for (const ViewNode* n : subtrees(spec)) {
    avail[n] = working & projected_attributes(*n, catalog);
    fds[n] = mine_fds(ev.eval(*n), avail[n]);
  }

  auto descend = [&](const ViewNode* n, const FD& d) -> const ViewNode* {
    switch (n->kind) {
      case NodeKind::relation: return nullptr;
      case NodeKind::project:
      case NodeKind::select: return n->left.get();
      case NodeKind::join:
        if (n->op == JoinOperator::left_semi) return n->left.get();
        if (n->op == JoinOperator::right_semi) return n->right.get();
        if (d.attrs().subset_of(avail[n->left.get()])) return n->left.get();
        if (d.attrs().subset_of(avail[n->right.get()])) return n->right.get();
        return nullptr;
    }
    return nullptr;
  };

  ProvenanceSet out;
  AttrSet pv = projected_attributes(spec, catalog);
  for (const auto& d : fds[&spec]) {
    if (!d.attrs().subset_of(pv)) continue;
    std::vector<const ViewNode*> path{&spec};
    while (true) {
      const ViewNode* next = descend(path.back(), d);
      if (!next || !fds[next].count(d)) break;
      path.push_back(next);
    }
    const ViewNode* first = path.back();
    ProvenanceType type = ProvenanceType::base;
    if (first->kind == NodeKind::project)
      throw Error("FD first holds at a projection: " + render_fd(d, catalog));
    if (first->kind == NodeKind::select) {
      type = ProvenanceType::upstaged_selection;
    } else if (first->kind == NodeKind::join) {
      if (single_table(d.attrs(), catalog)) {
        auto tables = referenced_tables(*first->left);
        bool left = std::find(tables.begin(), tables.end(), catalog.table_of(d.rhs)) != tables.end();
        type = left ? ProvenanceType::upstaged_left : ProvenanceType::upstaged_right;
      } else {
        const ViewNode* top = nullptr;
        for (const ViewNode* n : path) {
          if (n->kind == NodeKind::join) {
            top = n;
            break;
          }
        }
        type = cross_type(d, base_sigma(fds[top], join_attrs, catalog), avail[top], join_attrs,
                          catalog);
      }
    }
    out.push_back({d, type, canonical_string(*first, catalog)});
  }
  sort_triples(out, catalog);
  return out;
}

ComparisonReport diff_fd_sets(const FDSet& infine_fds, const FDSet& baseline_fds) {
  ComparisonReport r;
  r.infine_fds = infine_fds;
  r.baseline_fds = baseline_fds;
  for (const auto& b : baseline_fds) {
    if (implies_fd(infine_fds, b)) r.matched.insert(b);
    else r.only_baseline.insert(b);
  }
  for (const auto& f : infine_fds)
    if (!implies_fd(baseline_fds, f)) r.only_infine.insert(f);
  if (baseline_fds.empty()) r.accuracy = infine_fds.empty() ? 1.0 : 0.0;
  else r.accuracy = static_cast<double>(r.matched.size()) / static_cast<double>(baseline_fds.size());
  return r;
}

ComparisonReport compare(const Database& db, const ViewNode& spec, int repeat) {
  if (repeat < 1) throw ValidationError("repeat must be positive");
  AttrSet pv = projected_attributes(spec, *db.catalog);
  std::map<std::string, double> sums;
  InfineRun run;
  FDSet oracle;
  std::uint64_t baseline_cells = 0;
  for (int i = 0; i < repeat; ++i) {
    auto t0 = Clock::now();
    run = run_infine(db, spec);
    double infine_total = seconds_since(t0);

    CellMeter meter;
    auto t1 = Clock::now();
    RelationInstance view = materialize_view(db, spec, &meter);
    double mat = seconds_since(t1);
    auto t2 = Clock::now();
    oracle = mine_fds(view, pv);
    double mine = seconds_since(t2);
    baseline_cells = meter.cells();

    sums["infine.base"] += run.times.base;
    sums["infine.upstage"] += run.times.upstage;
    sums["infine.infer"] += run.times.infer;
    sums["infine.mine"] += run.times.mine;
    sums["infine.materialize"] += run.times.materialize;
    sums["infine.total"] += infine_total;
    sums["baseline.materialize"] += mat;
    sums["baseline.mine"] += mine;
    sums["baseline.total"] += mat + mine;
  }
  ComparisonReport r = diff_fd_sets(fds_of(run.triples), oracle);
  r.cells_materialized_infine = run.cells;
  r.cells_materialized_baseline = baseline_cells;
  r.repeat = repeat;
  for (auto& [k, v] : sums) r.timings[k] = v / repeat;
  for (const auto& t : run.triples) r.type_counts[std::string(type_name(t.type))]++;
  return r;
}

namespace {

nlohmann::ordered_json fds_json(const FDSet& fds, const Catalog& catalog) {
  std::vector<std::string> rendered;
  for (const auto& f : fds) rendered.push_back(render_fd(f, catalog));
  std::sort(rendered.begin(), rendered.end());
  return rendered;
}

}  // namespace

std::string report_to_json(const ComparisonReport& r, const Catalog& catalog) {
  nlohmann::ordered_json j;
  j["accuracy"] = r.accuracy;
  j["infine_fd_count"] = r.infine_fds.size();
  j["baseline_fd_count"] = r.baseline_fds.size();
  j["matched"] = fds_json(r.matched, catalog);
  j["only_infine"] = fds_json(r.only_infine, catalog);
  j["only_baseline"] = fds_json(r.only_baseline, catalog);
  j["cells_materialized_infine"] = r.cells_materialized_infine;
  j["cells_materialized_baseline"] = r.cells_materialized_baseline;
  j["repeat"] = r.repeat;
  j["type_counts"] = r.type_counts;
  j["timings_seconds"] = r.timings;
  return j.dump(2);
}

std::string report_to_text(const ComparisonReport& r, const Catalog& catalog) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  os << "accuracy            " << r.accuracy << "\n";
  os << "fds (infine/base)   " << r.infine_fds.size() << " / " << r.baseline_fds.size() << "\n";
  os << "matched             " << r.matched.size() << "\n";
  os << "only infine         " << r.only_infine.size() << "\n";
  os << "only baseline       " << r.only_baseline.size() << "\n";
  os << "cells (infine/base) " << r.cells_materialized_infine << " / "
     << r.cells_materialized_baseline << "\n";
  for (const auto& [k, v] : r.type_counts) os << "type " << std::left << std::setw(17) << k << v << "\n";
  for (const auto& [k, v] : r.timings) os << std::left << std::setw(22) << k << v << " s\n";
  for (const auto& f : r.only_infine) os << "  + " << render_fd(f, catalog) << "\n";
  for (const auto& f : r.only_baseline) os << "  - " << render_fd(f, catalog) << "\n";
  return os.str();
}

}  // namespace infine
