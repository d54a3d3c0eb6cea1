#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace infine {

using AttrId = std::uint16_t;
inline constexpr std::size_t kMaxAttrs = 256;

// Fixed-width bitset over attribute ids.
class AttrSet {
 public:
  AttrSet() = default;
  AttrSet(std::initializer_list<AttrId> ids) {
    for (AttrId a : ids) insert(a);
  }
  template <typename It>
  AttrSet(It first, It last) {
    for (; first != last; ++first) insert(*first);
  }

  static AttrSet single(AttrId a) {
    AttrSet s;
    s.insert(a);
    return s;
  }

  void insert(AttrId a) { w_[a >> 6] |= bit(a); }
  void erase(AttrId a) { w_[a >> 6] &= ~bit(a); }
  bool contains(AttrId a) const { return (w_[a >> 6] & bit(a)) != 0; }

  bool empty() const {
    for (auto w : w_)
      if (w) return false;
    return true;
  }
  std::size_t size() const {
    std::size_t n = 0;
    for (auto w : w_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  bool subset_of(const AttrSet& o) const {
    for (std::size_t i = 0; i < kWords; ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }
  bool intersects(const AttrSet& o) const {
    for (std::size_t i = 0; i < kWords; ++i)
      if (w_[i] & o.w_[i]) return true;
    return false;
  }

  AttrSet operator|(const AttrSet& o) const {
    AttrSet r;
    for (std::size_t i = 0; i < kWords; ++i) r.w_[i] = w_[i] | o.w_[i];
    return r;
  }
  AttrSet operator&(const AttrSet& o) const {
    AttrSet r;
    for (std::size_t i = 0; i < kWords; ++i) r.w_[i] = w_[i] & o.w_[i];
    return r;
  }
  AttrSet operator-(const AttrSet& o) const {
    AttrSet r;
    for (std::size_t i = 0; i < kWords; ++i) r.w_[i] = w_[i] & ~o.w_[i];
    return r;
  }
  AttrSet& operator|=(const AttrSet& o) { return *this = *this | o; }
  AttrSet& operator&=(const AttrSet& o) { return *this = *this & o; }
  AttrSet& operator-=(const AttrSet& o) { return *this = *this - o; }

  AttrSet with(AttrId a) const {
    AttrSet r = *this;
    r.insert(a);
    return r;
  }
  AttrSet without(AttrId a) const {
    AttrSet r = *this;
    r.erase(a);
    return r;
  }

  // Ascending ids.
  std::vector<AttrId> ids() const {
    std::vector<AttrId> out;
    for_each([&](AttrId a) { out.push_back(a); });
    return out;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < kWords; ++i) {
      std::uint64_t w = w_[i];
      while (w) {
        int b = std::countr_zero(w);
        f(static_cast<AttrId>(i * 64 + static_cast<std::size_t>(b)));
        w &= w - 1;
      }
    }
  }

  int max_id() const {
    for (std::size_t i = kWords; i-- > 0;)
      if (w_[i]) return static_cast<int>(i * 64 + 63 - static_cast<std::size_t>(std::countl_zero(w_[i])));
    return -1;
  }

  std::size_t hash() const {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto w : w_) h = (h ^ w) * 0x100000001b3ULL;
    return h;
  }

  auto operator<=>(const AttrSet&) const = default;
  bool operator==(const AttrSet&) const = default;

 private:
  static constexpr std::size_t kWords = kMaxAttrs / 64;
  static std::uint64_t bit(AttrId a) { return std::uint64_t{1} << (a & 63); }
  std::array<std::uint64_t, kWords> w_{};
};

struct AttrSetHash {
  std::size_t operator()(const AttrSet& s) const { return s.hash(); }
};

}  // namespace infine
