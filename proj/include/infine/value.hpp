#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace infine {

// Exact decimal kept in normalized text form: optional leading '-', no
// superfluous zeros, "0" for zero. Two decimals are equal iff their forms are.
class Decimal {
 public:
  static std::optional<Decimal> parse(std::string_view text);
  static Decimal from_int(std::int64_t v);

  const std::string& str() const { return repr_; }
  bool negative() const { return !repr_.empty() && repr_[0] == '-'; }

  std::strong_ordering operator<=>(const Decimal& other) const;
  bool operator==(const Decimal& other) const { return repr_ == other.repr_; }

 private:
  std::string repr_ = "0";
};

enum class ValueKind : std::uint8_t { null_token, number, text };

class Value {
 public:
  Value() = default;

  static Value null() { return Value(); }
  static Value number(const Decimal& d);
  static Value text(std::string s);
  // Number when the text is a decimal literal, text otherwise.
  static Value infer(std::string_view s);

  ValueKind kind() const { return kind_; }
  bool is_null() const { return kind_ == ValueKind::null_token; }
  bool is_number() const { return kind_ == ValueKind::number; }
  bool is_text() const { return kind_ == ValueKind::text; }

  // Decimal form for numbers, raw bytes for text, empty for null.
  const std::string& payload() const { return payload_; }
  std::string debug_string() const;

  bool operator==(const Value& other) const = default;
  std::size_t hash() const;

 private:
  ValueKind kind_ = ValueKind::null_token;
  std::string payload_;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

// Ordering inside one kind; nullopt when kinds differ or a side is null.
std::optional<std::strong_ordering> compare_ordered(const Value& a,
                                                    const Value& b);

}  // namespace infine
