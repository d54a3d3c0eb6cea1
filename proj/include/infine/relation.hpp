#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "infine/attrset.hpp"
#include "infine/predicate.hpp"
#include "infine/value.hpp"

namespace infine {

struct AttributeRef {
  std::string table;
  std::string name;

  std::string qualified() const { return table + "." + name; }
  auto operator<=>(const AttributeRef&) const = default;
};

// Registry of every attribute known to a session. Ids follow registration
// order, so a table's attributes are numbered in schema order.
class Catalog {
 public:
  AttrId add(const std::string& table, const std::string& name);

  std::optional<AttrId> find(std::string_view table, std::string_view name) const;
  std::optional<AttrId> find_qualified(std::string_view qualified) const;

  const AttributeRef& ref(AttrId id) const { return attrs_.at(id); }
  std::string qualified(AttrId id) const { return attrs_.at(id).qualified(); }
  const std::string& table_of(AttrId id) const { return attrs_.at(id).table; }
  std::size_t size() const { return attrs_.size(); }

  bool has_table(std::string_view table) const;
  AttrSet table_attrs(std::string_view table) const;
  const std::vector<std::string>& tables() const { return tables_; }

 private:
  std::vector<AttributeRef> attrs_;
  std::vector<std::string> tables_;
  std::map<std::string, AttrSet, std::less<>> by_table_;
};

class Dictionary {
 public:
  std::uint32_t intern(const Value& v);
  std::optional<std::uint32_t> find(const Value& v) const;
  const Value& value(std::uint32_t code) const { return values_[code]; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<Value> values_;
  std::unordered_map<Value, std::uint32_t, ValueHash> index_;
};

// Dictionary-encoded column. The dictionary may hold values no row uses.
struct Column {
  std::shared_ptr<const Dictionary> dict;
  std::vector<std::uint32_t> codes;

  const Value& at(std::size_t row) const { return dict->value(codes[row]); }
  std::size_t cardinality_bound() const { return dict->size(); }
};

class RelationInstance {
 public:
  RelationInstance() = default;
  // rows_hint gives the tuple count of a zero-column instance.
  RelationInstance(std::string name, std::vector<AttrId> schema,
                   std::vector<Column> columns, std::size_t rows_hint = 0);

  static RelationInstance from_rows(std::string name, std::vector<AttrId> schema,
                                    const std::vector<std::vector<Value>>& rows);

  const std::string& name() const { return name_; }
  const std::vector<AttrId>& schema() const { return schema_; }
  AttrSet attrs() const { return attrs_; }
  std::size_t size() const { return rows_; }
  std::size_t arity() const { return schema_.size(); }
  std::size_t cells() const { return rows_ * schema_.size(); }

  bool has(AttrId a) const { return attrs_.contains(a); }
  const Column& column(AttrId a) const;
  const Column& column_at(std::size_t pos) const { return columns_[pos]; }
  const Value& at(std::size_t row, AttrId a) const { return column(a).at(row); }
  std::vector<Value> row(std::size_t r) const;

 private:
  std::string name_;
  std::vector<AttrId> schema_;
  AttrSet attrs_;
  std::vector<Column> columns_;
  std::vector<std::int32_t> position_;
  std::size_t rows_ = 0;
};

enum class JoinOperator { inner, full_outer, left_outer, right_outer, left_semi, right_semi };

std::string_view join_token(JoinOperator op);
std::optional<JoinOperator> join_from_token(std::string_view token);
bool is_semi(JoinOperator op);
bool is_outer(JoinOperator op);
// The operator obtained by exchanging the operands.
JoinOperator mirrored(JoinOperator op);

// Running total of cells produced by joins.
class CellMeter {
 public:
  void add(std::uint64_t rows, std::uint64_t cols) { cells_ += rows * cols; }
  std::uint64_t cells() const { return cells_; }
  void reset() { cells_ = 0; }

 private:
  std::uint64_t cells_ = 0;
};

// A catalog plus the named base relations registered in it.
struct Database {
  std::shared_ptr<Catalog> catalog = std::make_shared<Catalog>();
  std::map<std::string, std::shared_ptr<const RelationInstance>> relations;

  const RelationInstance& get(const std::string& name) const;
  void add(RelationInstance inst);
};

RelationInstance load_csv(const std::string& path, const std::string& table_name,
                          Catalog& catalog);
RelationInstance parse_csv(std::string_view text, const std::string& table_name,
                           Catalog& catalog);
void write_csv(const RelationInstance& inst, const Catalog& catalog,
               const std::string& path);

RelationInstance select_rows(const RelationInstance& inst, const Predicate& pred);
// Bag projection; columns keep schema order.
RelationInstance project(const RelationInstance& inst, const AttrSet& attrs);
RelationInstance join_instances(const RelationInstance& left,
                                const RelationInstance& right,
                                const std::vector<AttrId>& X,
                                const std::vector<AttrId>& Y, JoinOperator op,
                                CellMeter* meter = nullptr);

// Helpers used by the mining pipeline.
RelationInstance filter_rows(const RelationInstance& inst, const std::vector<bool>& keep);
RelationInstance distinct_project(const RelationInstance& inst, const AttrSet& attrs);
RelationInstance append_null_row(const RelationInstance& inst);
// keep[i] is true when row i of `probe` has a partner in `build`.
std::vector<bool> match_mask(const RelationInstance& probe,
                             const std::vector<AttrId>& probe_keys,
                             const RelationInstance& build,
                             const std::vector<AttrId>& build_keys);

}  // namespace infine
