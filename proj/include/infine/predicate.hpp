#pragma once

#include <string_view>
#include <vector>

#include "infine/attrset.hpp"
#include "infine/value.hpp"

namespace infine {

enum class Comparator { eq, ne, lt, le, gt, ge };

std::string_view comparator_token(Comparator c);

struct Condition {
  AttrId attr = 0;
  Comparator cmp = Comparator::eq;
  Value constant;

  bool operator==(const Condition&) const = default;
};

// Conjunction of attribute-versus-constant comparisons; empty means true.
struct Predicate {
  std::vector<Condition> conjuncts;

  AttrSet attrs() const {
    AttrSet s;
    for (const auto& c : conjuncts) s.insert(c.attr);
    return s;
  }
  bool operator==(const Predicate&) const = default;
};

// Throws ValidationError for an ordered comparison across kinds.
bool evaluate(const Condition& cond, const Value& cell);

}  // namespace infine
