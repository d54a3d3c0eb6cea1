#include "infine/value.hpp"

#include <functional>

namespace infine {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Compares two non-negative magnitudes "int[.frac]" in normalized form.
std::strong_ordering compare_magnitude(std::string_view a, std::string_view b) {
  auto split = [](std::string_view s) {
    auto dot = s.find('.');
    if (dot == std::string_view::npos) return std::pair{s, std::string_view{}};
    return std::pair{s.substr(0, dot), s.substr(dot + 1)};
  };
  auto [ai, af] = split(a);
  auto [bi, bf] = split(b);
  if (ai.size() != bi.size()) return ai.size() <=> bi.size();
  if (int c = ai.compare(bi); c != 0) return c <=> 0;
  std::size_t n = std::max(af.size(), bf.size());
  for (std::size_t i = 0; i < n; ++i) {
    char x = i < af.size() ? af[i] : '0';
    char y = i < bf.size() ? bf[i] : '0';
    if (x != y) return x <=> y;
  }
  return std::strong_ordering::equal;
}

}  // namespace

std::optional<Decimal> Decimal::parse(std::string_view text) {
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    neg = text[i] == '-';
    ++i;
  }
  std::size_t int_begin = i;
  while (i < text.size() && is_digit(text[i])) ++i;
  std::string_view int_part = text.substr(int_begin, i - int_begin);
  std::string_view frac_part;
  if (i < text.size() && text[i] == '.') {
    ++i;
    std::size_t frac_begin = i;
    while (i < text.size() && is_digit(text[i])) ++i;
    frac_part = text.substr(frac_begin, i - frac_begin);
  }
  if (i != text.size()) return std::nullopt;
  if (int_part.empty() && frac_part.empty()) return std::nullopt;

  while (int_part.size() > 1 && int_part.front() == '0') int_part.remove_prefix(1);
  if (int_part.empty()) int_part = "0";
  while (!frac_part.empty() && frac_part.back() == '0') frac_part.remove_suffix(1);

  Decimal d;
  d.repr_.clear();
  bool zero = int_part == "0" && frac_part.empty();
  if (neg && !zero) d.repr_.push_back('-');
  d.repr_.append(int_part);
  if (!frac_part.empty()) {
    d.repr_.push_back('.');
    d.repr_.append(frac_part);
  }
  return d;
}

Decimal Decimal::from_int(std::int64_t v) {
  return *parse(std::to_string(v));
}

std::strong_ordering Decimal::operator<=>(const Decimal& other) const {
  bool an = negative();
  bool bn = other.negative();
  if (an != bn) return an ? std::strong_ordering::less : std::strong_ordering::greater;
  std::string_view a = repr_;
  std::string_view b = other.repr_;
  if (an) {
    a.remove_prefix(1);
    b.remove_prefix(1);
    return compare_magnitude(b, a);
  }
  return compare_magnitude(a, b);
}

Value Value::number(const Decimal& d) {
  Value v;
  v.kind_ = ValueKind::number;
  v.payload_ = d.str();
  return v;
}

Value Value::text(std::string s) {
  Value v;
  v.kind_ = ValueKind::text;
  v.payload_ = std::move(s);
  return v;
}

Value Value::infer(std::string_view s) {
  if (auto d = Decimal::parse(s)) return number(*d);
  return text(std::string(s));
}

std::string Value::debug_string() const {
  switch (kind_) {
    case ValueKind::null_token: return "NULL";
    case ValueKind::number: return payload_;
    case ValueKind::text: return "'" + payload_ + "'";
  }
  return {};
}

std::size_t Value::hash() const {
  std::size_t h = std::hash<std::string>{}(payload_);
  return h ^ (static_cast<std::size_t>(kind_) * 0x9e3779b97f4a7c15ULL);
}

std::optional<std::strong_ordering> compare_ordered(const Value& a,
                                                    const Value& b) {
  if (a.is_null() || b.is_null() || a.kind() != b.kind()) return std::nullopt;
  if (a.is_number()) {
    return *Decimal::parse(a.payload()) <=> *Decimal::parse(b.payload());
  }
  int c = a.payload().compare(b.payload());
  return c <=> 0;
}

}  // namespace infine
