#include "infine/fd.hpp"

#include <algorithm>
#include <map>

#include "infine/errors.hpp"

namespace infine {

std::vector<std::string> attr_names(const AttrSet& s, const Catalog& catalog) {
  std::vector<std::string> out;
  s.for_each([&](AttrId a) { out.push_back(catalog.qualified(a)); });
  return out;
}

std::string render_fd(const FD& fd, const Catalog& catalog) {
  std::string out;
  if (fd.lhs.empty()) {
    out = "{}";
  } else {
    for (const auto& n : attr_names(fd.lhs, catalog)) {
      if (!out.empty()) out += ",";
      out += n;
    }
  }
  return out + " -> " + catalog.qualified(fd.rhs);
}

std::size_t StrippedPartition::error() const {
  std::size_t e = 0;
  for (const auto& c : classes) e += c.size() - 1;
  return e;
}

StrippedPartition StrippedPartition::normalized() const {
  StrippedPartition out = *this;
  for (auto& c : out.classes) std::sort(c.begin(), c.end());
  std::sort(out.classes.begin(), out.classes.end());
  return out;
}

namespace {

StrippedPartition single_partition(const RelationInstance& inst, AttrId a) {
  const Column& col = inst.column(a);
  std::vector<std::vector<std::uint32_t>> buckets(col.dict->size());
  for (std::uint32_t r = 0; r < inst.size(); ++r) buckets[col.codes[r]].push_back(r);
  StrippedPartition p;
  p.n = inst.size();
  for (auto& b : buckets)
    if (b.size() >= 2) p.classes.push_back(std::move(b));
  return p;
}

StrippedPartition full_partition(std::size_t n) {
  StrippedPartition p;
  p.n = n;
  if (n >= 2) {
    std::vector<std::uint32_t> all(n);
    for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
    p.classes.push_back(std::move(all));
  }
  return p;
}

}  // namespace

StrippedPartition build_partition(const RelationInstance& inst, const AttrSet& attrs) {
  attrs.for_each([&](AttrId a) { inst.column(a); });
  StrippedPartition p = full_partition(inst.size());
  attrs.for_each([&](AttrId a) { p = partition_product(p, single_partition(inst, a)); });
  return p;
}

StrippedPartition partition_product(const StrippedPartition& p, const StrippedPartition& q) {
  if (p.n != q.n) throw ValidationError("partition sizes differ");
  StrippedPartition out;
  out.n = p.n;
  std::vector<std::int32_t> owner(p.n, -1);
  for (std::size_t i = 0; i < p.classes.size(); ++i)
    for (auto t : p.classes[i]) owner[t] = static_cast<std::int32_t>(i);
  std::vector<std::vector<std::uint32_t>> scratch(p.classes.size());
  std::vector<std::int32_t> touched;
  for (const auto& cls : q.classes) {
    for (auto t : cls) {
      auto o = owner[t];
      if (o < 0) continue;
      if (scratch[o].empty()) touched.push_back(o);
      scratch[o].push_back(t);
    }
    for (auto o : touched) {
      if (scratch[o].size() >= 2) out.classes.push_back(std::move(scratch[o]));
      scratch[o].clear();
    }
    touched.clear();
  }
  return out;
}

bool refines(const StrippedPartition& p, const Column& rhs) {
  for (const auto& cls : p.classes) {
    auto code = rhs.codes[cls.front()];
    for (auto t : cls)
      if (rhs.codes[t] != code) return false;
  }
  return true;
}

bool fd_holds(const RelationInstance& inst, const FD& fd) {
  return refines(build_partition(inst, fd.lhs), inst.column(fd.rhs));
}

AttrSet closure(const AttrSet& attrs, const FDSet& fds) {
  AttrSet out = attrs;
  std::vector<const FD*> pending;
  pending.reserve(fds.size());
  for (const auto& f : fds)
    if (!out.contains(f.rhs)) pending.push_back(&f);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& f : pending) {
      if (f && f->lhs.subset_of(out)) {
        out.insert(f->rhs);
        f = nullptr;
        changed = true;
      }
    }
  }
  return out;
}

bool implies_fd(const FDSet& fds, const FD& d) {
  if (d.lhs.contains(d.rhs)) return true;
  return closure(d.lhs, fds).contains(d.rhs);
}

bool implies_all(const FDSet& a, const FDSet& b) {
  std::map<AttrSet, AttrSet> cache;
  for (const auto& d : b) {
    auto it = cache.find(d.lhs);
    if (it == cache.end()) it = cache.emplace(d.lhs, closure(d.lhs, a)).first;
    if (!it->second.contains(d.rhs)) return false;
  }
  return true;
}

bool equivalent(const FDSet& a, const FDSet& b) { return implies_all(a, b) && implies_all(b, a); }

FDSet minimize_cover(const FDSet& fds) {
  FDSet reduced;
  for (const auto& f : fds) {
    if (f.lhs.contains(f.rhs)) continue;
    AttrSet lhs = f.lhs;
    for (AttrId a : f.lhs.ids()) {
      AttrSet smaller = lhs.without(a);
      if (closure(smaller, fds).contains(f.rhs)) lhs = smaller;
    }
    reduced.insert(FD{lhs, f.rhs});
  }
  FDSet out = reduced;
  for (const auto& f : reduced) {
    FDSet rest = out;
    rest.erase(f);
    if (implies_fd(rest, f)) out = std::move(rest);
  }
  return out;
}

FDSet restrict_to(const FDSet& fds, const AttrSet& attrs) {
  FDSet out;
  for (const auto& f : fds)
    if (f.attrs().subset_of(attrs)) out.insert(f);
  return out;
}

}  // namespace infine
