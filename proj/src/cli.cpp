#include "kmslab/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "kmslab/campaign.hpp"
#include "kmslab/ellipticity.hpp"
#include "kmslab/poly_kernel.hpp"

namespace kmslab {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

bool is_json_path(const std::string& s) { return s.size() > 5 && s.substr(s.size() - 5) == ".json"; }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// A, B_part and base may be catalog names or JSON files.
struct Triple {
  PartMap a;
  HomOperator op;
  std::string b_label;
  std::string base_label;
};

Triple resolve(const std::string& a, const std::string& b_part, const std::string& base, std::size_t n) {
  const HomOperator b0 = is_json_path(base) ? HomOperator::from_json(read_json(base)) : base_operator(base, n);
  const std::string base_label = is_json_path(base) ? b0.label : base;
  HomOperator op = b0;
  std::string b_label;
  if (is_json_path(b_part)) {
    const PartMap bp = PartMap::from_json(read_json(b_part));
    op = compose_part(bp, b0);
    b_label = bp.name();
  } else if (!is_json_path(base)) {
    op = assembled_operator(b_part, base, n);
    b_label = part_name(parse_part_kind(b_part));
  } else {
    if (parse_part_kind(b_part) != PartKind::Id) {
      if (!b0.codomain.square()) throw Error("catalog B parts need a square codomain");
      op = compose_part(PartMap::build(b_part, b0.codomain.rows), b0);
    }
    b_label = part_name(parse_part_kind(b_part));
  }
  PartMap pa = is_json_path(a) ? PartMap::from_json(read_json(a))
               : is_json_path(base) ? PartMap::build(a, b0.domain.rows)
                                    : domain_part(a, base, n);
  if (pa.domain() != op.domain) throw Error("part map domain does not match the operator domain");
  return {std::move(pa), std::move(op), b_label, base_label};
}

std::string cell_file(const std::string& a, const std::string& b) { return a + "__" + b + ".json"; }

int cmd_table(const std::string& family, std::size_t n, const std::string& format, const std::string& out_dir,
              std::uint64_t seed, std::ostream& out, std::ostream& err) {
  ClassifyOptions opt;
  opt.seed = seed;
  const ClassificationTable t = classification_table(family, n, opt);
  const std::string rendered = format == "json" ? dump(t.to_json()) : format == "csv" ? t.to_csv() : t.to_markdown();
  out << rendered;
  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    write_text(dir / "table.json", dump(t.to_json()));
    write_text(dir / "table.md", t.to_markdown());
    write_text(dir / "table.csv", t.to_csv());
    for (const auto& row : t.cells)
      for (const auto& cell : row)
        if (cell.status != Status::C_elliptic) {
          json w = cell.to_json();
          w["schema"] = "kmslab.verdict/1";
          write_text(dir / "witnesses" / cell_file(cell.A, cell.B_part), dump(w));
        }
  }
  const std::size_t bad = t.mismatches();
  if (bad) err << bad << " cell(s) differ from the golden table\n";
  return bad ? 1 : 0;
}

int cmd_classify(const Triple& tr, const std::string& format, const std::string& out_dir, std::uint64_t seed,
                 std::ostream& out) {
  ClassifyOptions opt;
  opt.seed = seed;
  const EllipticityVerdict v = classify(tr.a, tr.op, tr.b_label, tr.base_label, opt);
  json j = v.to_json();
  j["schema"] = "kmslab.verdict/1";
  if (format == "json") {
    out << dump(j);
  } else if (format == "csv") {
    out << "A,B_part,base,n,status,xi\n"
        << v.A << ',' << v.B_part << ',' << v.base << ',' << v.n << ',' << status_code(v.status) << ','
        << (v.witness ? "\"" + to_string(v.witness->xi) + "\"" : "") << "\n";
  } else {
    out << "| A | B part | base | n | verdict | witness xi |\n|---|---|---|---|---|---|\n"
        << "| " << v.A << " | " << v.B_part << " | " << v.base << " | " << v.n << " | " << status_name(v.status)
        << " | " << (v.witness ? to_string(v.witness->xi) : "") << " |\n";
  }
  if (!out_dir.empty()) write_text(fs::path(out_dir) / "verdict.json", dump(j));
  return 0;
}

int cmd_kernel(const Triple& tr, int cap, const std::string& format, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  KernelBasis k;
  try {
    k = kernel_polynomials(tr.a, tr.op, cap);
  } catch (const CapExceeded& e) {
    const json j = {{"schema", "kmslab.kernel/1"},
                    {"A", tr.a.name()},
                    {"B", tr.op.label},
                    {"n", tr.op.n},
                    {"cap_exceeded", true},
                    {"cap", e.cap},
                    {"message", e.what()}};
    if (format == "json") out << dump(j);
    if (!out_dir.empty()) write_text(fs::path(out_dir) / "kernel.json", dump(j));
    err << e.what() << "\n";
    return 3;
  }
  const json j = k.to_json();
  if (format == "json") {
    out << dump(j);
  } else if (format == "csv") {
    out << "degree,slice_dim\n";
    for (std::size_t d = 0; d < k.slice_dims.size(); ++d) out << d << ',' << k.slice_dims[d] << "\n";
  } else {
    out << "kernel of " << k.A << " with " << k.B << " (n = " << k.n << "): dim " << k.dim() << ", degree bound "
        << k.degree_bound << "\n";
    for (std::size_t i = 0; i < k.elements.size(); ++i)
    {
      out << "- degree " << k.degrees[i] << ": [";
      const PolyField& f = k.elements[i];
      for (std::size_t r = 0; r < f.rows; ++r) {
        out << (r ? "; " : "");
        for (std::size_t c = 0; c < f.cols; ++c) out << (c ? ", " : "") << f.at(r, c).to_string();
      }
      out << "]\n";
    }
  }
  if (!out_dir.empty()) write_text(fs::path(out_dir) / "kernel.json", dump(j));
  return 0;
}

std::string campaign_csv(const CampaignResult& r) {
  std::ostringstream s;
  if (r.report.contains("cells")) {
    s << "A,B_part,status,expectation";
    for (const auto& g : r.report["grids"]) s << ",sup_N" << g.get<std::size_t>();
    s << ",relative_change,pass\n";
    for (const auto& c : r.report["cells"]) {
      s << c["A"].get<std::string>() << ',' << c["B_part"].get<std::string>() << ',' << c["status"].get<std::string>()
        << ',' << c["expectation"].get<std::string>();
      for (const auto& g : r.report["grids"]) s << ',' << c["sup"][std::to_string(g.get<std::size_t>())].dump();
      s << ',' << c["relative_change"].dump() << ',' << (c["pass"].get<bool>() ? "true" : "false") << "\n";
    }
  } else {
    s << "preset,pass,expectation,summary\n"
      << r.preset << ',' << (r.pass ? "true" : "false") << ",\"" << r.expectation << "\",\"" << r.summary << "\"\n";
  }
  return s.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Korn-Maxwell-Sobolev classification and verification toolkit", "kmslab"};
  app.require_subcommand(1);
  std::string family, a = "sym", b_part = "Id", base = "curl", format = "json", out_dir, preset = "kms1";
  std::size_t n = 3;
  std::uint64_t seed = 1;
  int cap = 8, random_fields = 32, bump_fields = 8;
  double p = 0, q = 0, eps_zero = 1e-10, eps_pos = 1e-2;
  int j = 0;
  std::vector<std::size_t> grids;
  bool dump_fields = false, list = false;

  const auto formats = CLI::IsMember({"json", "csv", "markdown"});
  auto common = [&](CLI::App* c) {
    c->add_option("--n", n, "dimension")->check(CLI::Range(std::size_t(1), std::size_t(12)));
    c->add_option("--seed", seed, "seed for all randomized steps");
    c->add_option("--format", format, "json, csv or markdown")->check(formats);
    c->add_option("--out", out_dir, "directory for written artifacts");
  };
  auto triple = [&](CLI::App* c) {
    c->add_option("--A", a, "part map name or JSON file");
    c->add_option("--B-part", b_part, "part map applied after the base operator, name or JSON file");
    c->add_option("--base", base, "curl, inc, div, curl_generalized, grad, or a JSON operator file");
  };

  auto* table = app.add_subcommand("table", "reproduce a classification table");
  table->add_option("--family", family, "curl, inc or div")->required()->check(CLI::IsMember({"curl", "inc", "div"}));
  common(table);
  table->get_option("--format")->default_str("markdown");

  auto* cls = app.add_subcommand("classify", "classify one (A, B part, base) triple");
  common(cls);
  triple(cls);

  auto* ker = app.add_subcommand("kernel", "polynomial kernel of (A, B part o base)");
  common(ker);
  triple(ker);
  ker->add_option("--cap", cap, "degree cap")->check(CLI::Range(0, 20));

  auto* ver = app.add_subcommand("verify", "run a verification campaign");
  common(ver);
  triple(ver);
  ver->add_option("--preset", preset, "campaign preset")->check(CLI::IsMember(preset_names()));
  ver->add_option("--p", p, "exponent p");
  ver->add_option("--q", q, "exponent q");
  ver->add_option("--j", j, "derivative order j");
  ver->add_option("--grid", grids, "samples per axis, repeatable");
  ver->add_option("--random-fields", random_fields, "band-limited fields in the corpus")->check(CLI::NonNegativeNumber);
  ver->add_option("--bump-fields", bump_fields, "bump fields in the corpus")->check(CLI::NonNegativeNumber);
  ver->add_option("--eps-zero", eps_zero, "relative threshold for a vanishing right-hand side");
  ver->add_option("--eps-pos", eps_pos, "relative threshold for a positive left-hand side");
  ver->add_flag("--dump-fields", dump_fields, "write binary field snapshots under --out/fields");
  ver->add_flag("--list", list, "list presets and exit");

  std::vector<const char*> argv{"kmslab"};
  for (const auto& s : args) argv.push_back(s.c_str());
  bool table_format_given = false;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    table_format_given = table->count("--format") > 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (table->parsed()) {
      if (!table_format_given) format = "markdown";
      if (family != "div" && n != 3) throw Error(family + " tables exist only for n = 3");
      if (family == "div" && n < 2) throw Error("div tables need n >= 2");
      return cmd_table(family, n, format, out_dir, seed, out, err);
    }
    if (cls->parsed()) return cmd_classify(resolve(a, b_part, base, n), format, out_dir, seed, out);
    if (ker->parsed()) return cmd_kernel(resolve(a, b_part, base, n), cap, format, out_dir, out, err);
    if (list) {
      for (const auto& name : preset_names()) out << name << "\n";
      return 0;
    }
    CampaignOptions opt;
    if (ver->count("--grid")) opt.grids = grids;
    if (ver->count("--p")) opt.p = p;
    if (ver->count("--q")) opt.q = q;
    if (ver->count("--j")) opt.j = j;
    opt.seed = seed;
    opt.random_fields = random_fields;
    opt.bump_fields = bump_fields;
    opt.thresholds = {eps_zero, eps_pos};
    opt.A = a;
    opt.B_part = b_part;
    opt.base = base;
    opt.n = n;
    if (dump_fields) {
      if (out_dir.empty()) throw Error("--dump-fields needs --out");
      opt.dump_dir = (fs::path(out_dir) / "fields").string();
    }
    const CampaignResult r = run_preset(preset, opt);
    const json jr = r.to_json();
    out << (format == "csv" ? campaign_csv(r) : dump(jr));
    if (!out_dir.empty()) {
      write_text(fs::path(out_dir) / "campaign.json", dump(jr));
      write_text(fs::path(out_dir) / "campaign.csv", campaign_csv(r));
    }
    err << r.preset << ": " << (r.pass ? "PASS" : "FAIL") << " (" << r.summary << ")\n";
    return r.pass ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace kmslab
