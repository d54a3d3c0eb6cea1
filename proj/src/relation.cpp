#include "infine/relation.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "infine/errors.hpp"

namespace infine {

namespace {

struct CodeVecHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto c : v) h = (h ^ c) * 0x100000001b3ULL + (h >> 29);
    return h;
  }
};

using KeyIndex =
    std::unordered_map<std::vector<std::uint32_t>, std::vector<std::uint32_t>, CodeVecHash>;

constexpr std::uint32_t kAbsent = 0xffffffffu;

// Maps every code of `from` onto the code of the same value in `to`.
std::vector<std::uint32_t> translate(const Dictionary& from, const Dictionary& to) {
  std::vector<std::uint32_t> out(from.size(), kAbsent);
  for (std::uint32_t c = 0; c < from.size(); ++c) {
    if (auto t = to.find(from.value(c))) out[c] = *t;
  }
  return out;
}

void check_keys(const RelationInstance& left, const RelationInstance& right,
                const std::vector<AttrId>& X, const std::vector<AttrId>& Y) {
  if (X.size() != Y.size() || X.empty())
    throw ValidationError("join key arity mismatch: " + std::to_string(X.size()) +
                          " vs " + std::to_string(Y.size()));
  for (AttrId a : X) left.column(a);
  for (AttrId a : Y) right.column(a);
}

// Index of `build` rows by key, expressed in the code space of `probe`.
// Rows whose key has a value unknown to `probe` are left out.
KeyIndex index_in_probe_space(const RelationInstance& probe,
                              const std::vector<AttrId>& probe_keys,
                              const RelationInstance& build,
                              const std::vector<AttrId>& build_keys) {
  std::vector<std::vector<std::uint32_t>> tr;
  for (std::size_t i = 0; i < probe_keys.size(); ++i) {
    tr.push_back(translate(*build.column(build_keys[i]).dict,
                           *probe.column(probe_keys[i]).dict));
  }
  KeyIndex index;
  std::vector<std::uint32_t> key(probe_keys.size());
  for (std::uint32_t r = 0; r < build.size(); ++r) {
    bool ok = true;
    for (std::size_t i = 0; i < build_keys.size() && ok; ++i) {
      std::uint32_t c = tr[i][build.column(build_keys[i]).codes[r]];
      if (c == kAbsent) ok = false;
      key[i] = c;
    }
    if (ok) index[key].push_back(r);
  }
  return index;
}

std::vector<std::uint32_t> row_key(const RelationInstance& inst,
                                   const std::vector<AttrId>& keys, std::size_t r) {
  std::vector<std::uint32_t> key(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) key[i] = inst.column(keys[i]).codes[r];
  return key;
}

// Gathers rows of `src`; a negative index yields a null cell.
Column gather(const Column& src, const std::vector<std::int64_t>& rows) {
  bool pad = std::any_of(rows.begin(), rows.end(), [](std::int64_t r) { return r < 0; });
  Column out;
  std::uint32_t null_code = 0;
  if (pad) {
    auto existing = src.dict->find(Value::null());
    if (existing) {
      out.dict = src.dict;
      null_code = *existing;
    } else {
      auto d = std::make_shared<Dictionary>(*src.dict);
      null_code = d->intern(Value::null());
      out.dict = std::move(d);
    }
  } else {
    out.dict = src.dict;
  }
  out.codes.reserve(rows.size());
  for (auto r : rows) out.codes.push_back(r < 0 ? null_code : src.codes[static_cast<std::size_t>(r)]);
  return out;
}

}  // namespace

AttrId Catalog::add(const std::string& table, const std::string& name) {
  if (find(table, name))
    throw ValidationError("duplicate attribute " + table + "." + name);
  if (attrs_.size() >= kMaxAttrs)
    throw ValidationError("too many attributes (limit " + std::to_string(kMaxAttrs) + ")");
  auto id = static_cast<AttrId>(attrs_.size());
  attrs_.push_back({table, name});
  auto it = by_table_.find(table);
  if (it == by_table_.end()) {
    tables_.push_back(table);
    it = by_table_.emplace(table, AttrSet{}).first;
  }
  it->second.insert(id);
  return id;
}

std::optional<AttrId> Catalog::find(std::string_view table, std::string_view name) const {
  auto it = by_table_.find(table);
  if (it == by_table_.end()) return std::nullopt;
  std::optional<AttrId> hit;
  it->second.for_each([&](AttrId a) {
    if (attrs_[a].name == name) hit = a;
  });
  return hit;
}

std::optional<AttrId> Catalog::find_qualified(std::string_view qualified) const {
  auto dot = qualified.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  return find(qualified.substr(0, dot), qualified.substr(dot + 1));
}

bool Catalog::has_table(std::string_view table) const {
  return by_table_.find(table) != by_table_.end();
}

AttrSet Catalog::table_attrs(std::string_view table) const {
  auto it = by_table_.find(table);
  return it == by_table_.end() ? AttrSet{} : it->second;
}

std::uint32_t Dictionary::intern(const Value& v) {
  auto it = index_.find(v);
  if (it != index_.end()) return it->second;
  auto code = static_cast<std::uint32_t>(values_.size());
  values_.push_back(v);
  index_.emplace(v, code);
  return code;
}

std::optional<std::uint32_t> Dictionary::find(const Value& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

RelationInstance::RelationInstance(std::string name, std::vector<AttrId> schema,
                                   std::vector<Column> columns, std::size_t rows_hint)
    : name_(std::move(name)), schema_(std::move(schema)), columns_(std::move(columns)) {
  if (schema_.size() != columns_.size())
    throw ValidationError("schema and column count differ in " + name_);
  for (AttrId a : schema_) {
    if (attrs_.contains(a)) throw ValidationError("repeated attribute in schema of " + name_);
    attrs_.insert(a);
  }
  rows_ = columns_.empty() ? rows_hint : columns_.front().codes.size();
  for (const auto& c : columns_) {
    if (c.codes.size() != rows_) throw ValidationError("ragged columns in " + name_);
  }
  int max_id = attrs_.max_id();
  position_.assign(static_cast<std::size_t>(max_id + 1), -1);
  for (std::size_t i = 0; i < schema_.size(); ++i) position_[schema_[i]] = static_cast<std::int32_t>(i);
}

RelationInstance RelationInstance::from_rows(std::string name, std::vector<AttrId> schema,
                                             const std::vector<std::vector<Value>>& rows) {
  std::vector<Column> cols(schema.size());
  std::vector<std::shared_ptr<Dictionary>> dicts;
  for (std::size_t i = 0; i < schema.size(); ++i) dicts.push_back(std::make_shared<Dictionary>());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != schema.size())
      throw ValidationError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                            " cells, expected " + std::to_string(schema.size()));
    for (std::size_t i = 0; i < schema.size(); ++i) cols[i].codes.push_back(dicts[i]->intern(rows[r][i]));
  }
  for (std::size_t i = 0; i < schema.size(); ++i) cols[i].dict = dicts[i];
  return RelationInstance(std::move(name), std::move(schema), std::move(cols));
}

const Column& RelationInstance::column(AttrId a) const {
  if (a >= position_.size() || position_[a] < 0)
    throw ValidationError("unknown attribute id " + std::to_string(a) + " in " + name_);
  return columns_[static_cast<std::size_t>(position_[a])];
}

std::vector<Value> RelationInstance::row(std::size_t r) const {
  std::vector<Value> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.at(r));
  return out;
}

std::string_view join_token(JoinOperator op) {
  switch (op) {
    case JoinOperator::inner: return "join";
    case JoinOperator::full_outer: return "fjoin";
    case JoinOperator::left_outer: return "ljoin";
    case JoinOperator::right_outer: return "rjoin";
    case JoinOperator::left_semi: return "lsemi";
    case JoinOperator::right_semi: return "rsemi";
  }
  return "join";
}

std::optional<JoinOperator> join_from_token(std::string_view token) {
  for (auto op : {JoinOperator::inner, JoinOperator::full_outer, JoinOperator::left_outer,
                  JoinOperator::right_outer, JoinOperator::left_semi, JoinOperator::right_semi}) {
    if (join_token(op) == token) return op;
  }
  return std::nullopt;
}

bool is_semi(JoinOperator op) {
  return op == JoinOperator::left_semi || op == JoinOperator::right_semi;
}

bool is_outer(JoinOperator op) {
  return op == JoinOperator::full_outer || op == JoinOperator::left_outer ||
         op == JoinOperator::right_outer;
}

JoinOperator mirrored(JoinOperator op) {
  switch (op) {
    case JoinOperator::left_outer: return JoinOperator::right_outer;
    case JoinOperator::right_outer: return JoinOperator::left_outer;
    case JoinOperator::left_semi: return JoinOperator::right_semi;
    case JoinOperator::right_semi: return JoinOperator::left_semi;
    default: return op;
  }
}

const RelationInstance& Database::get(const std::string& name) const {
  auto it = relations.find(name);
  if (it == relations.end()) throw ValidationError("unknown table " + name);
  return *it->second;
}

void Database::add(RelationInstance inst) {
  std::string name = inst.name();
  relations[name] = std::make_shared<const RelationInstance>(std::move(inst));
}

RelationInstance select_rows(const RelationInstance& inst, const Predicate& pred) {
  std::vector<bool> keep(inst.size(), true);
  for (const auto& cond : pred.conjuncts) {
    const Column& col = inst.column(cond.attr);
    std::vector<std::int8_t> verdict(col.dict->size(), -1);
    for (std::size_t r = 0; r < inst.size(); ++r) {
      if (!keep[r]) continue;
      auto code = col.codes[r];
      if (verdict[code] < 0) verdict[code] = evaluate(cond, col.dict->value(code)) ? 1 : 0;
      keep[r] = verdict[code] == 1;
    }
  }
  return filter_rows(inst, keep);
}

RelationInstance project(const RelationInstance& inst, const AttrSet& attrs) {
  attrs.for_each([&](AttrId a) { inst.column(a); });
  std::vector<AttrId> schema;
  std::vector<Column> cols;
  for (std::size_t i = 0; i < inst.arity(); ++i) {
    if (attrs.contains(inst.schema()[i])) {
      schema.push_back(inst.schema()[i]);
      cols.push_back(inst.column_at(i));
    }
  }
  return RelationInstance(inst.name(), std::move(schema), std::move(cols), inst.size());
}

RelationInstance filter_rows(const RelationInstance& inst, const std::vector<bool>& keep) {
  std::vector<Column> cols;
  for (std::size_t i = 0; i < inst.arity(); ++i) {
    const Column& src = inst.column_at(i);
    Column c;
    c.dict = src.dict;
    for (std::size_t r = 0; r < inst.size(); ++r)
      if (keep[r]) c.codes.push_back(src.codes[r]);
    cols.push_back(std::move(c));
  }
  auto kept = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
  return RelationInstance(inst.name(), inst.schema(), std::move(cols), kept);
}

RelationInstance distinct_project(const RelationInstance& inst, const AttrSet& attrs) {
  RelationInstance p = project(inst, attrs);
  std::unordered_set<std::vector<std::uint32_t>, CodeVecHash> seen;
  std::vector<bool> keep(p.size(), false);
  std::vector<std::uint32_t> key(p.arity());
  for (std::size_t r = 0; r < p.size(); ++r) {
    for (std::size_t i = 0; i < p.arity(); ++i) key[i] = p.column_at(i).codes[r];
    keep[r] = seen.insert(key).second;
  }
  return filter_rows(p, keep);
}

RelationInstance append_null_row(const RelationInstance& inst) {
  std::vector<Column> cols;
  for (std::size_t i = 0; i < inst.arity(); ++i) {
    std::vector<std::int64_t> rows(inst.size());
    for (std::size_t r = 0; r < inst.size(); ++r) rows[r] = static_cast<std::int64_t>(r);
    rows.push_back(-1);
    cols.push_back(gather(inst.column_at(i), rows));
  }
  return RelationInstance(inst.name(), inst.schema(), std::move(cols), inst.size() + 1);
}

std::vector<bool> match_mask(const RelationInstance& probe,
                             const std::vector<AttrId>& probe_keys,
                             const RelationInstance& build,
                             const std::vector<AttrId>& build_keys) {
  check_keys(probe, build, probe_keys, build_keys);
  KeyIndex index = index_in_probe_space(probe, probe_keys, build, build_keys);
  std::vector<bool> mask(probe.size(), false);
  for (std::size_t r = 0; r < probe.size(); ++r)
    mask[r] = index.count(row_key(probe, probe_keys, r)) > 0;
  return mask;
}

RelationInstance join_instances(const RelationInstance& left,
                                const RelationInstance& right,
                                const std::vector<AttrId>& X,
                                const std::vector<AttrId>& Y, JoinOperator op,
                                CellMeter* meter) {
  check_keys(left, right, X, Y);
  if (left.attrs().intersects(right.attrs()))
    throw ValidationError("join operands share attributes");

  if (op == JoinOperator::left_semi || op == JoinOperator::right_semi) {
    bool keep_left = op == JoinOperator::left_semi;
    const auto& kept = keep_left ? left : right;
    auto mask = keep_left ? match_mask(left, X, right, Y) : match_mask(right, Y, left, X);
    RelationInstance out = filter_rows(kept, mask);
    if (meter) meter->add(out.size(), out.arity());
    return out;
  }

  KeyIndex index = index_in_probe_space(left, X, right, Y);
  std::vector<std::int64_t> lrows, rrows;
  std::vector<bool> right_used(right.size(), false);
  bool pad_left_rows = op == JoinOperator::left_outer || op == JoinOperator::full_outer;
  bool pad_right_rows = op == JoinOperator::right_outer || op == JoinOperator::full_outer;
  for (std::size_t l = 0; l < left.size(); ++l) {
    auto it = index.find(row_key(left, X, l));
    if (it != index.end()) {
      for (auto r : it->second) {
        lrows.push_back(static_cast<std::int64_t>(l));
        rrows.push_back(r);
        right_used[r] = true;
      }
    } else if (pad_left_rows) {
      lrows.push_back(static_cast<std::int64_t>(l));
      rrows.push_back(-1);
    }
  }
  if (pad_right_rows) {
    for (std::size_t r = 0; r < right.size(); ++r) {
      if (!right_used[r]) {
        lrows.push_back(-1);
        rrows.push_back(static_cast<std::int64_t>(r));
      }
    }
  }

  std::vector<AttrId> schema = left.schema();
  schema.insert(schema.end(), right.schema().begin(), right.schema().end());
  std::vector<Column> cols;
  for (std::size_t i = 0; i < left.arity(); ++i) cols.push_back(gather(left.column_at(i), lrows));
  for (std::size_t i = 0; i < right.arity(); ++i) cols.push_back(gather(right.column_at(i), rrows));
  RelationInstance out(left.name() + "_" + right.name(), std::move(schema), std::move(cols));
  if (meter) meter->add(out.size(), out.arity());
  return out;
}

std::string_view comparator_token(Comparator c) {
  switch (c) {
    case Comparator::eq: return "=";
    case Comparator::ne: return "!=";
    case Comparator::lt: return "<";
    case Comparator::le: return "<=";
    case Comparator::gt: return ">";
    case Comparator::ge: return ">=";
  }
  return "=";
}

bool evaluate(const Condition& cond, const Value& cell) {
  if (cond.cmp == Comparator::eq) return cell == cond.constant;
  if (cond.cmp == Comparator::ne) return !(cell == cond.constant);
  if (cond.constant.is_null())
    throw ValidationError("ordered comparison against NULL");
  if (cell.is_null()) return false;
  auto ord = compare_ordered(cell, cond.constant);
  if (!ord)
    throw ValidationError("ordered comparison between " + cell.debug_string() + " and " +
                          cond.constant.debug_string() + " crosses value kinds");
  switch (cond.cmp) {
    case Comparator::lt: return *ord < 0;
    case Comparator::le: return *ord <= 0;
    case Comparator::gt: return *ord > 0;
    case Comparator::ge: return *ord >= 0;
    default: return false;
  }
}

}  // namespace infine
