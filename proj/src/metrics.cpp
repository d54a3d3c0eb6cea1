#include "infine/metrics.hpp"

#include <map>

#include "infine/errors.hpp"

namespace infine {

namespace {

using Key = std::vector<std::pair<ValueKind, std::string>>;

std::map<Key, std::size_t> key_counts(const RelationInstance& inst,
                                      const std::vector<AttrId>& cols) {
  std::map<Key, std::size_t> out;
  std::vector<const Column*> columns;
  for (AttrId a : cols) columns.push_back(&inst.column(a));
  for (std::size_t r = 0; r < inst.size(); ++r) {
    Key k;
    for (const Column* c : columns) {
      const Value& v = c->at(r);
      k.emplace_back(v.kind(), v.payload());
    }
    ++out[k];
  }
  return out;
}

double cov(const std::map<Key, std::size_t>& in_join, const std::map<Key, std::size_t>& in_inst) {
  double sum = 0;
  for (const auto& [k, n] : in_inst) {
    auto it = in_join.find(k);
    if (it != in_join.end()) sum += static_cast<double>(it->second) / static_cast<double>(n);
  }
  return sum / static_cast<double>(in_inst.size());
}

}  // namespace

double coverage(const RelationInstance& left, const RelationInstance& right,
                const std::vector<AttrId>& X, const std::vector<AttrId>& Y, JoinOperator op) {
  if (X.size() != Y.size() || X.empty()) throw ValidationError("join keys must pair up");
  auto in_left = key_counts(left, X);
  auto in_right = key_counts(right, Y);
  if (in_left.empty()) throw ValidationError("empty key projection on the left operand");
  if (in_right.empty()) throw ValidationError("empty key projection on the right operand");
  RelationInstance join = join_instances(left, right, X, Y, op);
  // A semi-join keeps one operand's columns; matched rows agree on both keys.
  const auto& jx = op == JoinOperator::right_semi ? Y : X;
  const auto& jy = op == JoinOperator::left_semi ? X : Y;
  return 0.5 * (cov(key_counts(join, jx), in_left) + cov(key_counts(join, jy), in_right));
}

}  // namespace infine
