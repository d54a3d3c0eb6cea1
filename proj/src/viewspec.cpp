#include "infine/viewspec.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

#include "infine/errors.hpp"

namespace infine {

namespace {

const std::set<std::string, std::less<>> kKeywords = {
    "project", "select", "join", "fjoin", "ljoin", "rjoin", "lsemi", "rsemi", "and", "NULL"};

bool plain_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return kKeywords.count(s) == 0;
}

std::string render_ident(const std::string& s) {
  if (plain_identifier(s)) return s;
  std::string out = "`";
  for (char c : s) {
    if (c == '`') out.push_back('`');
    out.push_back(c);
  }
  return out + "`";
}

std::string render_attr(AttrId a, const Catalog& catalog) {
  const auto& ref = catalog.ref(a);
  return render_ident(ref.table) + "." + render_ident(ref.name);
}

std::string render_constant(const Value& v) {
  if (v.is_null()) return "NULL";
  if (v.is_number()) return v.payload();
  std::string out = "'";
  for (char c : v.payload()) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  return out + "'";
}

void collect_tables(const ViewNode& n, std::vector<std::string>& out) {
  if (n.kind == NodeKind::relation) {
    out.push_back(n.relation);
    return;
  }
  if (n.left) collect_tables(*n.left, out);
  if (n.right) collect_tables(*n.right, out);
}

// ---- tokenizer ----

enum class Tok { ident, quoted_ident, number, string, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (i_ >= src_.size()) {
        out.push_back({Tok::end, "", i_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_space() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
  }

  Token next() {
    std::size_t start = i_;
    char c = src_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
        ++i_;
      return {Tok::ident, std::string(src_.substr(start, i_ - start)), start};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      ++i_;
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
      if (i_ < src_.size() && src_[i_] == '.') {
        ++i_;
        std::size_t frac = i_;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        if (frac == i_) throw ParseError("malformed number", start);
      }
      return {Tok::number, std::string(src_.substr(start, i_ - start)), start};
    }
    if (c == '\'' || c == '`') {
      return quoted(c, c == '\'' ? Tok::string : Tok::quoted_ident);
    }
    for (std::string_view op : {"!=", "<>", "<=", ">="}) {
      if (src_.substr(i_, 2) == op) {
        i_ += 2;
        return {Tok::punct, std::string(op == "<>" ? "!=" : op), start};
      }
    }
    if (std::string_view("[](),.=<>").find(c) != std::string_view::npos) {
      ++i_;
      return {Tok::punct, std::string(1, c), start};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

  Token quoted(char q, Tok kind) {
    std::size_t start = i_++;
    std::string text;
    while (true) {
      if (i_ >= src_.size()) throw ParseError("unterminated quoted text", start);
      char c = src_[i_++];
      if (c == q) {
        if (i_ < src_.size() && src_[i_] == q) {
          text.push_back(q);
          ++i_;
          continue;
        }
        return {kind, text, start};
      }
      text.push_back(c);
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
};

// ---- parser ----

struct RawAttr {
  std::optional<std::string> table;
  std::string name;
  std::size_t pos = 0;
};

class Parser {
 public:
  Parser(std::string_view text, const Catalog& catalog)
      : toks_(Lexer(text).run()), catalog_(catalog) {}

  ViewPtr parse() {
    ViewPtr e = expr();
    if (peek().kind != Tok::end) fail("unexpected trailing input '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(p_ + k, toks_.size() - 1)]; }
  const Token& take() { return toks_[std::min(p_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().pos); }

  bool at_keyword(std::string_view kw, std::size_t k = 0) const {
    return peek(k).kind == Tok::ident && peek(k).text == kw;
  }
  bool at_punct(std::string_view p, std::size_t k = 0) const {
    return peek(k).kind == Tok::punct && peek(k).text == p;
  }
  void expect(std::string_view p) {
    if (!at_punct(p)) fail("expected '" + std::string(p) + "'");
    take();
  }

  std::optional<JoinOperator> at_joinop() const {
    if (peek().kind != Tok::ident) return std::nullopt;
    return join_from_token(peek().text);
  }

  ViewPtr expr() {
    ViewPtr acc = term();
    while (auto op = at_joinop()) {
      take();
      expect("[");
      std::vector<std::pair<RawAttr, RawAttr>> pairs;
      do {
        RawAttr a = qattr();
        expect("=");
        RawAttr b = qattr();
        pairs.emplace_back(std::move(a), std::move(b));
      } while (at_punct(",") && (take(), true));
      expect("]");
      ViewPtr rhs = term();
      AttrSet lavail = projected_attributes(*acc, catalog_);
      AttrSet ravail = projected_attributes(*rhs, catalog_);
      std::vector<AttrId> X, Y;
      for (const auto& [a, b] : pairs) {
        auto la = try_resolve(a, lavail);
        auto rb = try_resolve(b, ravail);
        if (!la || !rb) {
          auto ra = try_resolve(a, ravail);
          auto lb = try_resolve(b, lavail);
          if (ra && lb) {
            X.push_back(*lb);
            Y.push_back(*ra);
            continue;
          }
          // Report against the original orientation.
          resolve(a, lavail);
          resolve(b, ravail);
        }
        X.push_back(*la);
        Y.push_back(*rb);
      }
      acc = make_join(catalog_, *op, std::move(X), std::move(Y), acc, rhs);
    }
    return acc;
  }

  ViewPtr term() {
    if (at_keyword("project") && at_punct("[", 1)) {
      take();
      expect("[");
      std::vector<RawAttr> attrs;
      if (!at_punct("]")) {
        do {
          attrs.push_back(qattr());
        } while (at_punct(",") && (take(), true));
      }
      expect("]");
      expect("(");
      ViewPtr child = expr();
      expect(")");
      AttrSet avail = projected_attributes(*child, catalog_);
      AttrSet chosen;
      for (const auto& a : attrs) chosen.insert(resolve(a, avail));
      return make_project(catalog_, chosen, child);
    }
    if (at_keyword("select") && at_punct("[", 1)) {
      take();
      expect("[");
      std::vector<std::tuple<RawAttr, Comparator, Value>> preds;
      do {
        RawAttr a = qattr();
        Comparator cmp = comparator();
        Value v = constant();
        preds.emplace_back(std::move(a), cmp, std::move(v));
      } while (at_keyword("and") && (take(), true));
      expect("]");
      expect("(");
      ViewPtr child = expr();
      expect(")");
      AttrSet avail = projected_attributes(*child, catalog_);
      Predicate pred;
      for (auto& [a, cmp, v] : preds) pred.conjuncts.push_back({resolve(a, avail), cmp, v});
      return make_select(catalog_, std::move(pred), child);
    }
    if (at_punct("(")) {
      take();
      ViewPtr e = expr();
      expect(")");
      return e;
    }
    if (peek().kind == Tok::quoted_ident ||
        (peek().kind == Tok::ident && kKeywords.count(peek().text) == 0)) {
      const Token& t = take();
      if (!catalog_.has_table(t.text))
        throw ValidationError("unknown table '" + t.text + "' at offset " + std::to_string(t.pos));
      return make_relation(catalog_, t.text);
    }
    fail(peek().kind == Tok::end ? "unexpected end of input" : "unexpected '" + peek().text + "'");
  }

  std::string ident() {
    if (peek().kind == Tok::quoted_ident ||
        (peek().kind == Tok::ident && kKeywords.count(peek().text) == 0))
      return take().text;
    fail("expected identifier");
  }

  RawAttr qattr() {
    RawAttr a;
    a.pos = peek().pos;
    a.name = ident();
    if (at_punct(".")) {
      take();
      a.table = a.name;
      a.name = ident();
    }
    return a;
  }

  Comparator comparator() {
    if (peek().kind != Tok::punct) fail("expected comparison operator");
    const std::string& t = peek().text;
    Comparator c;
    if (t == "=") c = Comparator::eq;
    else if (t == "!=") c = Comparator::ne;
    else if (t == "<") c = Comparator::lt;
    else if (t == "<=") c = Comparator::le;
    else if (t == ">") c = Comparator::gt;
    else if (t == ">=") c = Comparator::ge;
    else fail("expected comparison operator");
    take();
    return c;
  }

  Value constant() {
    const Token& t = peek();
    if (t.kind == Tok::number) {
      take();
      return Value::number(*Decimal::parse(t.text));
    }
    if (t.kind == Tok::string) {
      take();
      return Value::text(t.text);
    }
    if (t.kind == Tok::ident && t.text == "NULL") {
      take();
      return Value::null();
    }
    fail("expected constant");
  }

  std::optional<AttrId> try_resolve(const RawAttr& a, const AttrSet& avail) const {
    try {
      return resolve(a, avail);
    } catch (const ValidationError&) {
      return std::nullopt;
    }
  }

  AttrId resolve(const RawAttr& a, const AttrSet& avail) const {
    std::string where = " at offset " + std::to_string(a.pos);
    if (a.table) {
      if (!catalog_.has_table(*a.table))
        throw ValidationError("unknown table '" + *a.table + "'" + where);
      auto id = catalog_.find(*a.table, a.name);
      if (!id) throw ValidationError("unknown attribute '" + *a.table + "." + a.name + "'" + where);
      if (!avail.contains(*id))
        throw ValidationError("attribute '" + *a.table + "." + a.name + "' is not available" + where);
      return *id;
    }
    std::vector<AttrId> hits;
    avail.for_each([&](AttrId id) {
      if (catalog_.ref(id).name == a.name) hits.push_back(id);
    });
    if (hits.empty()) throw ValidationError("unknown attribute '" + a.name + "'" + where);
    if (hits.size() > 1) throw ValidationError("ambiguous attribute '" + a.name + "'" + where);
    return hits.front();
  }

  std::vector<Token> toks_;
  std::size_t p_ = 0;
  const Catalog& catalog_;
};

AttrSet avail_of(const ViewNode& n, const Catalog& catalog) {
  return projected_attributes(n, catalog);
}

}  // namespace

ViewPtr make_relation(const Catalog& catalog, const std::string& name) {
  if (!catalog.has_table(name)) throw ValidationError("unknown table '" + name + "'");
  auto n = std::make_shared<ViewNode>();
  n->kind = NodeKind::relation;
  n->relation = name;
  return n;
}

ViewPtr make_project(const Catalog& catalog, AttrSet attrs, ViewPtr child) {
  if (!attrs.subset_of(avail_of(*child, catalog)))
    throw ValidationError("projection references unavailable attributes");
  auto n = std::make_shared<ViewNode>();
  n->kind = NodeKind::project;
  n->attrs = attrs;
  n->left = std::move(child);
  return n;
}

ViewPtr make_select(const Catalog& catalog, Predicate pred, ViewPtr child) {
  if (!pred.attrs().subset_of(avail_of(*child, catalog)))
    throw ValidationError("selection references unavailable attributes");
  for (const auto& c : pred.conjuncts) {
    if (c.constant.is_null() && c.cmp != Comparator::eq && c.cmp != Comparator::ne)
      throw ValidationError("ordered comparison against NULL on " + catalog.qualified(c.attr));
  }
  auto n = std::make_shared<ViewNode>();
  n->kind = NodeKind::select;
  n->predicate = std::move(pred);
  n->left = std::move(child);
  return n;
}

ViewPtr make_join(const Catalog& catalog, JoinOperator op, std::vector<AttrId> X,
                  std::vector<AttrId> Y, ViewPtr left, ViewPtr right) {
  if (X.empty() || X.size() != Y.size()) throw ValidationError("join key arity mismatch");
  AttrSet la = avail_of(*left, catalog);
  AttrSet ra = avail_of(*right, catalog);
  for (AttrId a : X)
    if (!la.contains(a))
      throw ValidationError("join attribute " + catalog.qualified(a) + " is not available on the left");
  for (AttrId a : Y)
    if (!ra.contains(a))
      throw ValidationError("join attribute " + catalog.qualified(a) + " is not available on the right");
  if (AttrSet(X.begin(), X.end()).size() != X.size() || AttrSet(Y.begin(), Y.end()).size() != Y.size())
    throw ValidationError("join attribute repeated in a key list");
  auto lt = referenced_tables(*left);
  for (const auto& t : referenced_tables(*right)) {
    if (std::find(lt.begin(), lt.end(), t) != lt.end())
      throw ValidationError("table " + t + " appears on both sides of a join");
  }
  auto n = std::make_shared<ViewNode>();
  n->kind = NodeKind::join;
  n->op = op;
  n->X = std::move(X);
  n->Y = std::move(Y);
  n->left = std::move(left);
  n->right = std::move(right);
  return n;
}

ViewPtr parse_view(std::string_view text, const Catalog& catalog) {
  return Parser(text, catalog).parse();
}

void validate(const ViewNode& spec, const Catalog& catalog) {
  switch (spec.kind) {
    case NodeKind::relation:
      make_relation(catalog, spec.relation);
      return;
    case NodeKind::project:
      validate(*spec.left, catalog);
      make_project(catalog, spec.attrs, spec.left);
      return;
    case NodeKind::select:
      validate(*spec.left, catalog);
      make_select(catalog, spec.predicate, spec.left);
      return;
    case NodeKind::join:
      validate(*spec.left, catalog);
      validate(*spec.right, catalog);
      make_join(catalog, spec.op, spec.X, spec.Y, spec.left, spec.right);
      return;
  }
}

AttrSet projected_attributes(const ViewNode& spec, const Catalog& catalog) {
  switch (spec.kind) {
    case NodeKind::relation: return catalog.table_attrs(spec.relation);
    case NodeKind::project: return spec.attrs;
    case NodeKind::select: return projected_attributes(*spec.left, catalog);
    case NodeKind::join:
      if (spec.op == JoinOperator::left_semi) return projected_attributes(*spec.left, catalog);
      if (spec.op == JoinOperator::right_semi) return projected_attributes(*spec.right, catalog);
      return projected_attributes(*spec.left, catalog) | projected_attributes(*spec.right, catalog);
  }
  return {};
}

std::string canonical_string(const ViewNode& spec, const Catalog& catalog) {
  switch (spec.kind) {
    case NodeKind::relation: return render_ident(spec.relation);
    case NodeKind::project: {
      std::string out = "project[";
      bool first = true;
      spec.attrs.for_each([&](AttrId a) {
        if (!first) out += ", ";
        first = false;
        out += render_attr(a, catalog);
      });
      return out + "](" + canonical_string(*spec.left, catalog) + ")";
    }
    case NodeKind::select: {
      std::string out = "select[";
      for (std::size_t i = 0; i < spec.predicate.conjuncts.size(); ++i) {
        const auto& c = spec.predicate.conjuncts[i];
        if (i) out += " and ";
        out += render_attr(c.attr, catalog) + " " + std::string(comparator_token(c.cmp)) + " " +
               render_constant(c.constant);
      }
      return out + "](" + canonical_string(*spec.left, catalog) + ")";
    }
    case NodeKind::join: {
      auto operand = [&](const ViewNode& n) {
        std::string s = canonical_string(n, catalog);
        return n.kind == NodeKind::join ? "(" + s + ")" : s;
      };
      std::string out = operand(*spec.left) + " " + std::string(join_token(spec.op)) + "[";
      for (std::size_t i = 0; i < spec.X.size(); ++i) {
        if (i) out += ", ";
        out += render_attr(spec.X[i], catalog) + " = " + render_attr(spec.Y[i], catalog);
      }
      return out + "] " + operand(*spec.right);
    }
  }
  return {};
}

bool structurally_equal(const ViewNode& a, const ViewNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::relation: return a.relation == b.relation;
    case NodeKind::project: return a.attrs == b.attrs && structurally_equal(*a.left, *b.left);
    case NodeKind::select:
      return a.predicate == b.predicate && structurally_equal(*a.left, *b.left);
    case NodeKind::join:
      return a.op == b.op && a.X == b.X && a.Y == b.Y && structurally_equal(*a.left, *b.left) &&
             structurally_equal(*a.right, *b.right);
  }
  return false;
}

AttrSet join_attributes(const ViewNode& spec) {
  AttrSet out;
  for (const ViewNode* n : subtrees(spec)) {
    if (n->kind != NodeKind::join) continue;
    out |= AttrSet(n->X.begin(), n->X.end());
    out |= AttrSet(n->Y.begin(), n->Y.end());
  }
  return out;
}

std::vector<std::string> referenced_tables(const ViewNode& spec) {
  std::vector<std::string> out;
  collect_tables(spec, out);
  return out;
}

std::vector<const ViewNode*> subtrees(const ViewNode& spec) {
  std::vector<const ViewNode*> out{&spec};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i]->left) out.push_back(out[i]->left.get());
    if (out[i]->right) out.push_back(out[i]->right.get());
  }
  return out;
}

}  // namespace infine
