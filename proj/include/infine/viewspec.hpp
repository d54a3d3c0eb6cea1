#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "infine/attrset.hpp"
#include "infine/predicate.hpp"
#include "infine/relation.hpp"

namespace infine {

enum class NodeKind { relation, project, select, join };

struct ViewNode;
using ViewPtr = std::shared_ptr<const ViewNode>;

struct ViewNode {
  NodeKind kind = NodeKind::relation;
  std::string relation;                 // relation
  AttrSet attrs;                        // project
  Predicate predicate;                  // select
  JoinOperator op = JoinOperator::inner;  // join
  std::vector<AttrId> X, Y;             // join keys, positionally paired
  ViewPtr left;                         // only child of project/select
  ViewPtr right;

  const ViewNode& child() const { return *left; }
};

ViewPtr make_relation(const Catalog& catalog, const std::string& name);
ViewPtr make_project(const Catalog& catalog, AttrSet attrs, ViewPtr child);
ViewPtr make_select(const Catalog& catalog, Predicate pred, ViewPtr child);
ViewPtr make_join(const Catalog& catalog, JoinOperator op, std::vector<AttrId> X,
                  std::vector<AttrId> Y, ViewPtr left, ViewPtr right);

// Throws ParseError on malformed text and ValidationError on unknown or
// unavailable names.
ViewPtr parse_view(std::string_view text, const Catalog& catalog);
// Re-checks every node; the constructors above already do this.
void validate(const ViewNode& spec, const Catalog& catalog);

AttrSet projected_attributes(const ViewNode& spec, const Catalog& catalog);
std::string canonical_string(const ViewNode& spec, const Catalog& catalog);
bool structurally_equal(const ViewNode& a, const ViewNode& b);

// Every attribute named in a join condition anywhere in the tree.
AttrSet join_attributes(const ViewNode& spec);
std::vector<std::string> referenced_tables(const ViewNode& spec);
// Every node of the tree, root first.
std::vector<const ViewNode*> subtrees(const ViewNode& spec);

}  // namespace infine
