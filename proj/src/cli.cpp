#include "infine/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "infine/baseline.hpp"
#include "infine/datagen.hpp"
#include "infine/errors.hpp"
#include "infine/infine.hpp"
#include "infine/metrics.hpp"

namespace infine {

namespace {

struct Options {
  std::string view;
  std::vector<std::string> tables;
  std::string format = "json";
  std::uint64_t seed = 1;
  int repeat = 1;
  std::string out;
  bool classify = false;

  // gen
  std::string spec_path;
  std::size_t n_tables = 2;
  std::size_t rows = 100;
  std::size_t attrs = 3;
  double ratio = 0.5;
  double overlap = 1.0;
  std::size_t multiplicity = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw IoError("cannot write " + o.out);
  f << text;
  if (!f) throw IoError("write failed: " + o.out);
}

Database load_tables(const Options& o) {
  Database db;
  for (const auto& binding : o.tables) {
    auto eq = binding.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == binding.size())
      throw CLI::ValidationError("--table", "expected NAME=PATH, got " + binding);
    std::string name = binding.substr(0, eq);
    if (db.relations.count(name)) throw CLI::ValidationError("--table", "bound twice: " + name);
    db.add(load_csv(binding.substr(eq + 1), name, *db.catalog));
  }
  return db;
}

ViewPtr load_view(const Options& o, const Database& db) {
  std::error_code ec;
  std::string text = std::filesystem::is_regular_file(o.view, ec) ? read_file(o.view) : o.view;
  ViewPtr view = parse_view(text, *db.catalog);
  for (const auto& t : referenced_tables(*view))
    if (!db.relations.count(t)) throw CLI::ValidationError("--table", "table not bound: " + t);
  return view;
}

std::string fds_text(const ProvenanceSet& triples, const Catalog& catalog) {
  std::ostringstream os;
  for (const auto& t : triples)
    os << type_name(t.type) << "\t" << render_fd(t.fd, catalog) << "\t" << t.subquery << "\n";
  return os.str();
}

int cmd_discover(const Options& o, std::ostream& out) {
  Database db = load_tables(o);
  ViewPtr view = load_view(o, db);
  ProvenanceSet triples = discover(db, *view);
  sort_triples(triples, *db.catalog);
  emit(o, o.format == "json" ? triples_to_json(triples, *db.catalog) + "\n"
                             : fds_text(triples, *db.catalog),
       out);
  return kExitOk;
}

int cmd_baseline(const Options& o, std::ostream& out) {
  Database db = load_tables(o);
  ViewPtr view = load_view(o, db);
  const Catalog& catalog = *db.catalog;
  if (o.classify) {
    ProvenanceSet triples = classify_provenance(db, *view);
    emit(o, o.format == "json" ? triples_to_json(triples, catalog) + "\n" : fds_text(triples, catalog),
         out);
    return kExitOk;
  }
  std::vector<std::string> rendered;
  for (const auto& f : oracle_fds(db, *view)) rendered.push_back(render_fd(f, catalog));
  std::sort(rendered.begin(), rendered.end());
  if (o.format == "json") {
    emit(o, nlohmann::ordered_json(rendered).dump(2) + "\n", out);
  } else {
    std::string text;
    for (const auto& r : rendered) text += r + "\n";
    emit(o, text, out);
  }
  return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
  Database db = load_tables(o);
  ViewPtr view = load_view(o, db);
  ComparisonReport r = compare(db, *view, o.repeat);
  emit(o, o.format == "json" ? report_to_json(r, *db.catalog) + "\n" : report_to_text(r, *db.catalog),
       out);
  return kExitOk;
}

int cmd_coverage(const Options& o, std::ostream& out) {
  Database db = load_tables(o);
  ViewPtr view = load_view(o, db);
  if (view->kind != NodeKind::join) throw ValidationError("coverage needs a join at the top of the view");
  RelationInstance L = materialize_view(db, *view->left);
  RelationInstance R = materialize_view(db, *view->right);
  std::ostringstream os;
  os << std::fixed << std::setprecision(9) << coverage(L, R, view->X, view->Y, view->op) << "\n";
  emit(o, os.str(), out);
  return kExitOk;
}

int cmd_gen(const Options& o, std::ostream& out) {
  GenSpec spec;
  if (!o.spec_path.empty()) {
    spec = gen_spec_from_json(read_file(o.spec_path));
  } else {
    spec.seed = o.seed;
    spec.key_overlap = o.overlap;
    spec.key_multiplicity = o.multiplicity;
    for (std::size_t i = 0; i < o.n_tables; ++i) {
      TableGen t;
      t.attr_count = o.attrs;
      t.tuple_count = o.rows;
      t.distinct_ratio = {o.ratio};
      spec.tables.push_back(t);
    }
  }
  Generated g = generate(spec);
  std::filesystem::path dir(o.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + o.out + ": " + ec.message());
  for (const auto& name : g.tables)
    write_csv(g.db.get(name), *g.db.catalog, (dir / (name + ".csv")).string());
  std::string manifest = manifest_json(spec, g) + "\n";
  {
    std::ofstream f(dir / "manifest.json", std::ios::binary);
    if (!f) throw IoError("cannot write manifest in " + o.out);
    f << manifest;
  }
  out << manifest;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Functional dependency discovery over SPJ views", "infine"};
  app.require_subcommand(1);
  Options o;

  auto add_view_opts = [&](CLI::App* sub) {
    sub->add_option("--view", o.view, "View file, or the view text itself")->required();
    sub->add_option("--table", o.tables, "Table binding NAME=PATH (repeatable)")->required();
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", o.out, "Write the result to PATH");
    sub->add_option("--seed", o.seed, "Random seed");
  };
  auto* discover = app.add_subcommand("discover", "FDs of the view with provenance");
  add_view_opts(discover);
  auto* baseline = app.add_subcommand("baseline", "FDs of the fully materialized view");
  add_view_opts(baseline);
  baseline->add_flag("--classify", o.classify, "Attach provenance by materializing sub-queries");
  auto* cmp = app.add_subcommand("compare", "Pipeline against full materialization");
  add_view_opts(cmp);
  cmp->add_option("--repeat", o.repeat, "Runs to average timings over")->check(CLI::PositiveNumber);
  auto* cov = app.add_subcommand("coverage", "Coverage of the top join of the view");
  add_view_opts(cov);
  auto* gen = app.add_subcommand("gen", "Generate chained synthetic tables");
  gen->add_option("--out", o.out, "Output directory")->required();
  gen->add_option("--spec", o.spec_path, "Generator spec JSON")->check(CLI::ExistingFile);
  gen->add_option("--seed", o.seed, "Random seed");
  gen->add_option("--tables", o.n_tables, "Number of tables")->check(CLI::Range(1, 64));
  gen->add_option("--rows", o.rows, "Tuples per table");
  gen->add_option("--attrs", o.attrs, "Free attributes per table")->check(CLI::Range(1, 200));
  gen->add_option("--ratio", o.ratio, "Distinct-value ratio")->check(CLI::Range(1e-9, 1.0));
  gen->add_option("--overlap", o.overlap, "Join key overlap")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--multiplicity", o.multiplicity, "Mean tuples per key on the right")
      ->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (discover->parsed()) return cmd_discover(o, out);
    if (baseline->parsed()) return cmd_baseline(o, out);
    if (cmp->parsed()) return cmd_compare(o, out);
    if (cov->parsed()) return cmd_coverage(o, out);
    return cmd_gen(o, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace infine
