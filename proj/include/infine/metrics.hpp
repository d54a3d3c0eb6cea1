#pragma once

#include <vector>

#include "infine/relation.hpp"

namespace infine {

// Mean per-key-value multiplication of each operand's tuples through the
// join, averaged over both operands. Multi-attribute keys are compared as
// composite values.
double coverage(const RelationInstance& left, const RelationInstance& right,
                const std::vector<AttrId>& X, const std::vector<AttrId>& Y, JoinOperator op);

}  // namespace infine
