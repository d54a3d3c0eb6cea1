#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "infine/fd.hpp"
#include "infine/relation.hpp"
#include "infine/viewspec.hpp"

namespace infine {

enum class ProvenanceType { base, upstaged_selection, upstaged_left, upstaged_right, inferred, join_fd };

std::string_view type_name(ProvenanceType t);
std::optional<ProvenanceType> type_from_name(std::string_view name);

struct ProvenanceTriple {
  FD fd;
  ProvenanceType type = ProvenanceType::base;
  std::string subquery;

  bool operator==(const ProvenanceTriple&) const = default;
};

using ProvenanceSet = std::vector<ProvenanceTriple>;

FDSet fds_of(const ProvenanceSet& triples);
// Orders by (subquery, type, rhs, lhs) using qualified names.
void sort_triples(ProvenanceSet& triples, const Catalog& catalog);
std::string triples_to_json(const ProvenanceSet& triples, const Catalog& catalog);

// Seconds spent per stage.
struct StageTimes {
  double base = 0;
  double upstage = 0;
  double infer = 0;
  double mine = 0;
  double materialize = 0;

  double total() const { return base + upstage + infer + mine + materialize; }
};

struct InfineRun {
  ProvenanceSet triples;
  std::uint64_t cells = 0;
  std::uint64_t data_checks = 0;
  StageTimes times;
};

InfineRun run_infine(const Database& db, const ViewNode& spec);
ProvenanceSet discover(const Database& db, const ViewNode& spec);

// Attributes the pipeline mines over: the root projection plus every join
// attribute of the tree.
AttrSet working_attributes(const ViewNode& spec, const Catalog& catalog);
bool single_table(const AttrSet& attrs, const Catalog& catalog);

// Single-table FDs plus FDs among join attributes.
FDSet base_sigma(const FDSet& node_fds, const AttrSet& join_attrs, const Catalog& catalog);
// inferred or join_fd for a multi-table FD holding at a join node whose
// working attributes are `avail`.
ProvenanceType cross_type(const FD& d, const FDSet& sigma_base, const AttrSet& avail,
                          const AttrSet& join_attrs, const Catalog& catalog);

// ---- per-node stages ----

ProvenanceSet selection_fds(const RelationInstance& view_child, const Predicate& predicate,
                            const ProvenanceSet& known, const AttrSet& proj,
                            const std::string& subquery);

struct JoinArgs {
  const Catalog* catalog = nullptr;
  const RelationInstance* left = nullptr;
  const RelationInstance* right = nullptr;
  std::vector<AttrId> X, Y;
  JoinOperator op = JoinOperator::inner;
  AttrSet proj;        // working attributes
  AttrSet join_attrs;  // every join attribute of the whole view
  std::string subquery;
  CellMeter* meter = nullptr;
};

// FDs of the two sides as they appear inside the join result.
struct JoinSides {
  bool has_left = false;
  bool has_right = false;
  FDSet left;
  FDSet right;
  ProvenanceSet upstaged;
};

JoinSides join_up_fds(const JoinArgs& args, const ProvenanceSet& knownL,
                      const ProvenanceSet& knownR);

// Validity oracle and lattice search for FDs spanning both join operands.
class JoinContext {
 public:
  JoinContext(const JoinArgs& args, const JoinSides& sides);

  const JoinArgs& args() const { return args_; }
  AttrSet left_avail() const { return left_avail_; }
  AttrSet right_avail() const { return right_avail_; }
  AttrSet avail() const { return left_avail_ | right_avail_; }

  bool valid(const AttrSet& lhs, AttrId rhs);
  bool cross(const AttrSet& lhs, AttrId rhs) const;
  // RHS that can appear in a cross FD at all.
  bool eligible(AttrId rhs) const;
  // Minimal lhs within `universe` for which lhs -> rhs holds and spans both sides.
  std::vector<AttrSet> minimal_cross(AttrId rhs, const AttrSet& universe);
  void add_found(const FD& fd);

  // All FDs known to hold in the join result so far.
  const FDSet& sigma() const { return sigma_; }
  FDSet side_fds() const;
  std::uint64_t data_checks() const { return data_checks_; }

  // Bookkeeping shared by the infer and mine stages.
  std::map<AttrId, std::vector<AttrSet>> explored;
  FDSet key_fds;
  FDSet sigma_base;

 private:
  bool side_valid(const AttrSet& lhs, AttrId rhs, bool left) const;
  bool data_check(const AttrSet& lhs, AttrId rhs);
  const StrippedPartition& wide_partition(const AttrSet& attrs);

  JoinArgs args_;
  const JoinSides& sides_;
  AttrSet left_avail_, right_avail_;
  AttrSet xset_, yset_;
  FDSet sigma_;
  std::map<std::pair<AttrSet, AttrId>, bool> cache_;
  std::map<AttrSet, RelationInstance> partials_;
  std::optional<RelationInstance> wide_;
  std::unordered_map<AttrSet, StrippedPartition, AttrSetHash> wide_parts_;
  std::uint64_t data_checks_ = 0;
};

ProvenanceSet infer_fds(JoinContext& ctx);
ProvenanceSet mine_join_fds(JoinContext& ctx, const ProvenanceSet& inferred);

}  // namespace infine
