#include "infine/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "json.hpp"

#include "infine/errors.hpp"
#include "infine/metrics.hpp"

namespace infine {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string encode(std::uint64_t v) {
  static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz";
  std::string out;
  do {
    out.push_back(kAlphabet[v % 26]);
    v /= 26;
  } while (v);
  return out;
}

Value make_value(std::uint64_t v, bool numeric) {
  return numeric ? Value::number(Decimal::from_int(static_cast<std::int64_t>(v)))
                 : Value::text(encode(v));
}

std::size_t ceil_div(double a) { return static_cast<std::size_t>(std::ceil(a - 1e-9)); }

// n draws from [offset, offset + domain): every value once while rows last,
// then uniform, then shuffled.
std::vector<std::uint64_t> draw(std::mt19937_64& rng, std::size_t n, std::size_t domain,
                                std::uint64_t offset) {
  std::vector<std::uint64_t> out;
  out.reserve(n);
  std::uniform_int_distribution<std::uint64_t> pick(0, domain - 1);
  for (std::size_t i = 0; i < n; ++i) out.push_back(offset + (i < domain ? i : pick(rng)));
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

double ratio_at(const TableGen& t, std::size_t i) {
  return t.distinct_ratio.size() == 1 ? t.distinct_ratio[0] : t.distinct_ratio[i];
}

}  // namespace

void validate(const GenSpec& spec) {
  if (spec.tables.empty()) throw ValidationError("generator needs at least one table");
  if (spec.key_overlap < 0 || spec.key_overlap > 1)
    throw ValidationError("key_overlap must lie in [0,1]");
  if (spec.key_multiplicity < 1) throw ValidationError("key_multiplicity must be positive");
  for (const auto& t : spec.tables) {
    if (t.attr_count < 1) throw ValidationError("attr_count must be at least 1");
    if (t.distinct_ratio.size() != 1 && t.distinct_ratio.size() != t.attr_count)
      throw ValidationError("distinct_ratio needs one entry or one per attribute");
    for (double r : t.distinct_ratio)
      if (!(r > 0 && r <= 1)) throw ValidationError("distinct ratios must lie in (0,1]");
    for (const auto& p : t.planted)
      if (!(p.ratio > 0 && p.ratio <= 1)) throw ValidationError("planted ratios must lie in (0,1]");
  }
}

Generated generate(const GenSpec& spec) {
  validate(spec);
  Generated g;
  std::mt19937_64 rng(spec.seed);
  std::size_t n_tables = spec.tables.size();

  // Key columns per link, drawn before the free columns.
  std::vector<std::vector<std::uint64_t>> left_keys(n_tables), right_keys(n_tables);
  for (std::size_t i = 0; i + 1 < n_tables; ++i) {
    std::size_t n_right = spec.tables[i + 1].tuple_count;
    std::size_t domain =
        std::max<std::size_t>(1, ceil_div(static_cast<double>(n_right) / spec.key_multiplicity));
    auto offset = static_cast<std::uint64_t>(std::llround((1 - spec.key_overlap) * domain));
    left_keys[i] = draw(rng, spec.tables[i].tuple_count, domain, 0);
    right_keys[i + 1] = draw(rng, n_right, domain, offset);
  }

  for (std::size_t i = 0; i < n_tables; ++i) {
    const TableGen& t = spec.tables[i];
    std::string name = "T" + std::to_string(i);
    std::vector<std::string> names;
    std::vector<std::vector<std::uint64_t>> cols;
    std::vector<std::size_t> distinct;
    if (i > 0) {
      names.push_back("k" + std::to_string(i - 1));
      cols.push_back(right_keys[i]);
    }
    if (i + 1 < n_tables) {
      names.push_back("k" + std::to_string(i));
      cols.push_back(left_keys[i]);
    }
    for (auto& c : cols) {
      std::vector<std::uint64_t> s = c;
      std::sort(s.begin(), s.end());
      distinct.push_back(static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin()));
    }
    for (std::size_t a = 0; a < t.attr_count; ++a) {
      std::size_t domain = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(ratio_at(t, a) * t.tuple_count)));
      names.push_back("a" + std::to_string(a));
      cols.push_back(draw(rng, t.tuple_count, domain, 0));
      distinct.push_back(std::min(domain, t.tuple_count));
    }
    for (std::size_t p = 0; p < t.planted.size(); ++p) {
      const auto& pc = t.planted[p];
      auto src = std::find(names.begin(), names.end(), pc.from);
      if (src == names.end())
        throw ValidationError("planted column source not found: " + name + "." + pc.from);
      std::size_t s = static_cast<std::size_t>(src - names.begin());
      std::size_t domain = std::max<std::size_t>(1, ceil_div(pc.ratio * distinct[s]));
      std::uint64_t salt = mix64(spec.seed ^ (i << 32) ^ p);
      std::vector<std::uint64_t> out;
      out.reserve(t.tuple_count);
      for (auto v : cols[s]) out.push_back(pc.ratio >= 1 ? v : mix64(v ^ salt) % domain);
      names.push_back("p" + std::to_string(p));
      cols.push_back(std::move(out));
      distinct.push_back(domain);
      g.planted.push_back({name, pc.from, names.back()});
    }

    std::vector<AttrId> schema;
    std::vector<Column> columns;
    for (std::size_t c = 0; c < names.size(); ++c) {
      schema.push_back(g.db.catalog->add(name, names[c]));
      auto dict = std::make_shared<Dictionary>();
      Column col;
      col.codes.reserve(cols[c].size());
      for (auto v : cols[c]) col.codes.push_back(dict->intern(make_value(v, t.numeric)));
      col.dict = std::move(dict);
      columns.push_back(std::move(col));
    }
    g.db.add(RelationInstance(name, std::move(schema), std::move(columns), t.tuple_count));
    g.tables.push_back(name);
  }

  for (std::size_t i = 0; i + 1 < n_tables; ++i) {
    ChainLink link{g.tables[i], g.tables[i + 1], "k" + std::to_string(i), 0};
    const auto& L = g.db.get(link.left_table);
    const auto& R = g.db.get(link.right_table);
    if (L.size() && R.size()) {
      AttrId x = *g.db.catalog->find(link.left_table, link.attr);
      AttrId y = *g.db.catalog->find(link.right_table, link.attr);
      link.coverage = coverage(L, R, {x}, {y}, JoinOperator::inner);
    }
    g.links.push_back(link);
  }
  return g;
}

std::string chain_view(const Generated& g) {
  std::string out = g.tables.front();
  for (const auto& l : g.links) {
    if (out != g.tables.front()) out = "(" + out + ")";
    out += " join[" + l.left_table + "." + l.attr + " = " + l.right_table + "." + l.attr + "] " +
           l.right_table;
  }
  return out;
}

std::string gen_spec_to_json(const GenSpec& spec) {
  nlohmann::ordered_json j;
  j["seed"] = spec.seed;
  j["key_overlap"] = spec.key_overlap;
  j["key_multiplicity"] = spec.key_multiplicity;
  j["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : spec.tables) {
    nlohmann::ordered_json tj;
    tj["attr_count"] = t.attr_count;
    tj["tuple_count"] = t.tuple_count;
    tj["distinct_ratio"] = t.distinct_ratio;
    tj["numeric"] = t.numeric;
    tj["planted"] = nlohmann::ordered_json::array();
    for (const auto& p : t.planted) tj["planted"].push_back({{"from", p.from}, {"ratio", p.ratio}});
    j["tables"].push_back(std::move(tj));
  }
  return j.dump(2);
}

GenSpec gen_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("generator spec: ") + e.what(), e.byte);
  }
  GenSpec spec;
  try {
    spec.seed = j.value("seed", spec.seed);
    spec.key_overlap = j.value("key_overlap", spec.key_overlap);
    spec.key_multiplicity = j.value("key_multiplicity", spec.key_multiplicity);
    for (const auto& tj : j.at("tables")) {
      TableGen t;
      t.attr_count = tj.value("attr_count", t.attr_count);
      t.tuple_count = tj.at("tuple_count").get<std::size_t>();
      if (tj.contains("distinct_ratio")) {
        if (tj["distinct_ratio"].is_array()) t.distinct_ratio = tj["distinct_ratio"].get<std::vector<double>>();
        else t.distinct_ratio = {tj["distinct_ratio"].get<double>()};
      }
      t.numeric = tj.value("numeric", false);
      if (tj.contains("planted"))
        for (const auto& pj : tj["planted"])
          t.planted.push_back({pj.at("from").get<std::string>(), pj.value("ratio", 1.0)});
      spec.tables.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("generator spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

std::string manifest_json(const GenSpec& spec, const Generated& g) {
  nlohmann::ordered_json j;
  j["spec"] = nlohmann::ordered_json::parse(gen_spec_to_json(spec));
  j["tables"] = nlohmann::ordered_json::array();
  for (const auto& name : g.tables) {
    const auto& inst = g.db.get(name);
    std::vector<std::string> cols;
    for (AttrId a : inst.schema()) cols.push_back(g.db.catalog->ref(a).name);
    j["tables"].push_back({{"name", name}, {"file", name + ".csv"}, {"rows", inst.size()},
                           {"columns", cols}});
  }
  j["planted_fds"] = nlohmann::ordered_json::array();
  for (const auto& p : g.planted)
    j["planted_fds"].push_back(p.table + "." + p.from + " -> " + p.table + "." + p.to);
  j["joins"] = nlohmann::ordered_json::array();
  for (const auto& l : g.links)
    j["joins"].push_back({{"left", l.left_table + "." + l.attr},
                          {"right", l.right_table + "." + l.attr},
                          {"coverage", l.coverage}});
  if (!g.links.empty()) j["view"] = chain_view(g);
  return j.dump(2);
}

}  // namespace infine
