#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infine/relation.hpp"

namespace infine {

// Column derived from another column of the same table. ratio = 1 gives an
// injective map; smaller ratios shrink the image.
struct PlantedColumn {
  std::string from;
  double ratio = 1.0;
};

struct TableGen {
  std::size_t attr_count = 1;
  std::size_t tuple_count = 0;
  // One ratio per free attribute, or a single ratio applied to all.
  std::vector<double> distinct_ratio{0.5};
  std::vector<PlantedColumn> planted;
  bool numeric = false;
};

// Tables T0..Tn-1 joined in a chain: Ti.k{i} pairs with Ti+1.k{i}.
struct GenSpec {
  std::uint64_t seed = 1;
  std::vector<TableGen> tables;
  double key_overlap = 1.0;
  std::size_t key_multiplicity = 1;
};

struct PlantedFd {
  std::string table;
  std::string from;
  std::string to;
};

struct ChainLink {
  std::string left_table;
  std::string right_table;
  std::string attr;  // same column name on both sides
  double coverage = 0;
};

struct Generated {
  Database db;
  std::vector<std::string> tables;
  std::vector<PlantedFd> planted;
  std::vector<ChainLink> links;
};

void validate(const GenSpec& spec);
Generated generate(const GenSpec& spec);

// Left-deep inner join over every link, in view syntax.
std::string chain_view(const Generated& g);
std::string manifest_json(const GenSpec& spec, const Generated& g);
// Reads the JSON form used by manifest_json's "spec" member.
GenSpec gen_spec_from_json(const std::string& text);
std::string gen_spec_to_json(const GenSpec& spec);

}  // namespace infine
