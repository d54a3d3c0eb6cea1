#include <algorithm>
#include <map>

#include "infine/fd.hpp"

namespace infine {

namespace {

struct LatticeNode {
  AttrSet lhs;
  std::vector<AttrId> ids;
  StrippedPartition partition;
  AttrSet open;  // rhs candidates with no valid subset lhs so far
};

bool share_prefix(const std::vector<AttrId>& a, const std::vector<AttrId>& b) {
  return std::equal(a.begin(), a.end() - 1, b.begin());
}

}  // namespace

FDSet mine_fds(const RelationInstance& inst, const AttrSet& attrs, const FDSet& known) {
  FDSet found;
  std::map<AttrId, const Column*> columns;
  attrs.for_each([&](AttrId a) { columns[a] = &inst.column(a); });

  std::vector<LatticeNode> level;
  level.push_back({AttrSet{}, {}, build_partition(inst, AttrSet{}), attrs});

  while (!level.empty()) {
    for (auto& node : level) {
      AttrSet implied = closure(node.lhs, known);
      AttrSet valid;
      bool superkey = node.partition.classes.empty();
      node.open.for_each([&](AttrId c) {
        if (implied.contains(c)) {
          valid.insert(c);
        } else if (superkey || refines(node.partition, *columns[c])) {
          valid.insert(c);
          found.insert(FD{node.lhs, c});
        }
      });
      node.open -= valid;
    }

    std::vector<LatticeNode> next;
    if (level.size() == 1 && level.front().lhs.empty()) {
      const AttrSet root_open = level.front().open;
      attrs.for_each([&](AttrId a) {
        AttrSet open = attrs.without(a) & root_open;
        if (open.empty() || !root_open.contains(a)) return;
        next.push_back({AttrSet::single(a), {a}, build_partition(inst, AttrSet::single(a)), open});
      });
    } else {
      // Apriori join of two nodes sharing all but their last attribute.
      std::map<AttrSet, const LatticeNode*> alive;
      std::vector<const LatticeNode*> ordered;
      for (const auto& node : level) {
        if (node.open.empty()) continue;
        alive.emplace(node.lhs, &node);
        ordered.push_back(&node);
      }
      std::sort(ordered.begin(), ordered.end(),
                [](const LatticeNode* a, const LatticeNode* b) { return a->ids < b->ids; });
      for (std::size_t i = 0; i < ordered.size(); ++i) {
        const LatticeNode& a = *ordered[i];
        for (std::size_t j = i + 1; j < ordered.size(); ++j) {
          const LatticeNode& b = *ordered[j];
          if (!share_prefix(a.ids, b.ids)) break;
          AttrSet lhs = a.lhs | b.lhs;
          std::vector<AttrId> ids = a.ids;
          ids.push_back(b.ids.back());
          AttrSet open = attrs - lhs;
          bool ok = true;
          for (AttrId x : ids) {
            auto it = alive.find(lhs.without(x));
            // a missing subset, or x determined by the rest of lhs
            if (it == alive.end() || !it->second->open.contains(x)) {
              ok = false;
              break;
            }
            open &= it->second->open;
          }
          if (!ok || open.empty()) continue;
          next.push_back({lhs, std::move(ids), partition_product(a.partition, b.partition), open});
        }
      }
    }
    level = std::move(next);
  }
  return found;
}

}  // namespace infine
