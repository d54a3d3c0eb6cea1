#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "infine/attrset.hpp"
#include "infine/relation.hpp"

namespace infine {

// Canonical functional dependency lhs -> rhs with rhs outside lhs.
struct FD {
  AttrSet lhs;
  AttrId rhs = 0;

  AttrSet attrs() const { return lhs.with(rhs); }
  auto operator<=>(const FD&) const = default;
  bool operator==(const FD&) const = default;
};

using FDSet = std::set<FD>;

std::string render_fd(const FD& fd, const Catalog& catalog);
// Qualified names sorted by catalog id.
std::vector<std::string> attr_names(const AttrSet& s, const Catalog& catalog);

// Stripped partition: equivalence classes of size >= 2 over tuple ids.
struct StrippedPartition {
  std::vector<std::vector<std::uint32_t>> classes;
  std::size_t n = 0;

  // Tuples in classes minus number of classes.
  std::size_t error() const;
  // Classes and their members in ascending order, for comparisons.
  StrippedPartition normalized() const;
  bool operator==(const StrippedPartition&) const = default;
};

StrippedPartition build_partition(const RelationInstance& inst, const AttrSet& attrs);
StrippedPartition partition_product(const StrippedPartition& p, const StrippedPartition& q);

bool fd_holds(const RelationInstance& inst, const FD& fd);
// True when every class of p agrees on `rhs`.
bool refines(const StrippedPartition& p, const Column& rhs);

// Minimal canonical FDs over `attrs` that hold on `inst` and are not implied
// by `known`. Every FD in `known` must hold on `inst`.
FDSet mine_fds(const RelationInstance& inst, const AttrSet& attrs, const FDSet& known = {});

AttrSet closure(const AttrSet& attrs, const FDSet& fds);
bool implies_fd(const FDSet& fds, const FD& d);
// Every FD of `b` follows from `a`.
bool implies_all(const FDSet& a, const FDSet& b);
bool equivalent(const FDSet& a, const FDSet& b);
FDSet minimize_cover(const FDSet& fds);
// FDs whose attributes lie inside `attrs`.
FDSet restrict_to(const FDSet& fds, const AttrSet& attrs);

}  // namespace infine
