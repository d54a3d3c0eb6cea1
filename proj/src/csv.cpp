#include <fstream>
#include <sstream>

#include "infine/errors.hpp"
#include "infine/relation.hpp"

namespace infine {

namespace {

struct Cell {
  std::string text;
  bool quoted = false;
};

// RFC 4180 records; a trailing newline does not open an empty record.
std::vector<std::vector<Cell>> split_records(std::string_view text) {
  std::vector<std::vector<Cell>> records;
  std::vector<Cell> record;
  Cell cell;
  bool in_quotes = false;
  bool after_quote = false;
  bool record_open = false;
  std::size_t i = 0;
  auto end_cell = [&] {
    record.push_back(std::move(cell));
    cell = Cell{};
    after_quote = false;
  };
  auto end_record = [&] {
    end_cell();
    records.push_back(std::move(record));
    record.clear();
    record_open = false;
  };
  while (i < text.size()) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.text.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        after_quote = true;
      } else {
        cell.text.push_back(c);
      }
      ++i;
      continue;
    }
    if (c == '"') {
      if (!cell.text.empty() || after_quote)
        throw ParseError("stray quote inside unquoted field", i);
      in_quotes = true;
      cell.quoted = true;
      record_open = true;
    } else if (c == ',') {
      end_cell();
      record_open = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else {
      if (after_quote) throw ParseError("text after closing quote", i);
      cell.text.push_back(c);
      record_open = true;
    }
    ++i;
  }
  if (in_quotes) throw ParseError("unterminated quoted field", text.size());
  if (record_open || !cell.text.empty()) end_record();
  return records;
}

// Quoting marks a field as literal text.
Value cell_value(const Cell& c) {
  if (c.quoted) return Value::text(c.text);
  if (c.text.empty() || c.text == "NULL") return Value::null();
  return Value::infer(c.text);
}

bool needs_quotes(const std::string& s) {
  return s.empty() || s == "NULL" || s.find_first_of(",\"\r\n") != std::string::npos;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

RelationInstance parse_csv(std::string_view text, const std::string& table_name,
                           Catalog& catalog) {
  auto records = split_records(text);
  if (records.empty()) throw ParseError("missing header row in " + table_name);
  const auto& header = records.front();
  for (std::size_t i = 0; i < header.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (header[i].text == header[j].text)
        throw ValidationError("duplicate header name '" + header[i].text + "' in " + table_name);
    }
  }
  if (catalog.has_table(table_name))
    throw ValidationError("table " + table_name + " is already registered");
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != header.size())
      throw ParseError("ragged row " + std::to_string(r) + " in " + table_name + ": " +
                       std::to_string(records[r].size()) + " fields, expected " +
                       std::to_string(header.size()));
  }
  std::vector<AttrId> schema;
  for (const auto& h : header) schema.push_back(catalog.add(table_name, h.text));
  std::vector<std::vector<Value>> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    std::vector<Value> row;
    for (const auto& c : records[r]) row.push_back(cell_value(c));
    rows.push_back(std::move(row));
  }
  return RelationInstance::from_rows(table_name, std::move(schema), rows);
}

RelationInstance load_csv(const std::string& path, const std::string& table_name,
                          Catalog& catalog) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path);
  return parse_csv(buf.str(), table_name, catalog);
}

void write_csv(const RelationInstance& inst, const Catalog& catalog,
               const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (std::size_t i = 0; i < inst.arity(); ++i) {
    if (i) out << ',';
    const auto& name = catalog.ref(inst.schema()[i]).name;
    out << (needs_quotes(name) ? quote(name) : name);
  }
  out << '\n';
  for (std::size_t r = 0; r < inst.size(); ++r) {
    for (std::size_t i = 0; i < inst.arity(); ++i) {
      if (i) out << ',';
      const Value& v = inst.column_at(i).at(r);
      if (v.is_null()) continue;
      const auto& p = v.payload();
      out << (v.is_text() && (needs_quotes(p) || Decimal::parse(p)) ? quote(p) : p);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace infine
