// One line per acceptance criterion; exit status 1 if any fails.
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kmslab/campaign.hpp"
#include "kmslab/cli.hpp"
#include "kmslab/ellipticity.hpp"
#include "kmslab/embedded_data.hpp"
#include "kmslab/poly_kernel.hpp"
#include "reference_witnesses.hpp"

using namespace kmslab;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int prec = 3) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

// Runs the CLI binary when given, otherwise the in-process entry point. Returns (exit code, stdout).
std::pair<int, std::string> run_cli_capture(const std::string& cli, const std::vector<std::string>& args) {
  if (cli.empty()) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str()};
  }
  std::string cmd = "'" + cli + "'";
  for (const auto& a : args) cmd += " '" + a + "'";
  cmd += " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw Error("cannot run " + cli);
  std::string out;
  std::array<char, 65536> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome table_reproduction(const std::string& cli) {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t matched = 0, total = 0, witnesses = 0, non_c = 0, bad_witness = 0;
  for (const std::string family : {"curl", "inc"}) {
    const fs::path dir = fs::temp_directory_path() / ("kmslab_acceptance_" + family);
    fs::remove_all(dir);
    const std::string out =
        run_cli_capture(cli, {"table", "--family", family, "--format", "json", "--out", dir.string()}).second;
    const json t = json::parse(out);
    for (const auto& c : t["cells"]) {
      ++total;
      if (c["golden"] == c["status"]) ++matched;
      if (c["status"] == "C") continue;
      ++non_c;
      const fs::path f = dir / "witnesses" / (c["A"].get<std::string>() + "__" + c["B_part"].get<std::string>() + ".json");
      if (!fs::exists(f)) continue;
      const json w = json::parse(std::ifstream(f));
      const PolyMatrix m =
          restricted_symbol(domain_part(w["A"], family, 3), assembled_operator(w["B_part"], family, 3));
      if (w["witness"].is_object() &&
          verify_witness(m, gvector_from_json(w["witness"]["xi"]), gvector_from_json(w["witness"]["v"])))
        ++witnesses;
      else
        ++bad_witness;
    }
    fs::remove_all(dir);
  }
  const double secs = seconds_since(t0);
  const bool pass = matched == 98 && total == 98 && witnesses == non_c && bad_witness == 0 && secs < 300;
  return {pass, std::to_string(matched) + "/" + std::to_string(total) + " verdicts, " + std::to_string(witnesses) + "/" +
                    std::to_string(non_c) + " exact witness files, " + fmt(secs) + " s"};
}

Outcome reference_witnesses_verify() {
  std::size_t ok = 0;
  const auto refs = kmslab::testing::reference_witnesses();
  for (const auto& w : refs) {
    const auto prep = kmslab::testing::prepare(w);
    if (verify_witness(prep.symbol, prep.xi, prep.coords)) ++ok;
  }
  return {ok == refs.size() && refs.size() == 6, std::to_string(ok) + "/" + std::to_string(refs.size()) + " verify"};
}

Outcome symbolic_identities() {
  std::mt19937_64 rng(2024);
  const HomOperator grad = build_operator(OperatorKind::grad, 3, 3);
  const HomOperator curl = build_operator(OperatorKind::curl_classical3, 3);
  const HomOperator inc = build_operator(OperatorKind::inc3, 3);
  const QMatrix sym = sym_matrix(3);
  std::size_t nye = 0, curl_grad = 0, inc_sym = 0, inc_comp = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const int degree = t % 5;
    const PolyField a = random_field(3, 3, 1, degree, rng);
    if (check_nye(a).holds) ++nye;
    const PolyField du = apply_symbolic(grad, a);
    if (apply_symbolic(curl, du).is_zero()) ++curl_grad;
    if (apply_symbolic(inc, apply_pointwise(sym, du, 3, 3)).is_zero()) ++inc_sym;
    const PolyField p = random_field(3, 3, 3, degree, rng);
    if (subtract(apply_symbolic(inc, p), apply_symbolic(curl, apply_symbolic(curl, p).transpose())).is_zero())
      ++inc_comp;
  }
  const bool structural = inc_by_composition() == inc;
  const bool pass = nye == trials && curl_grad == trials && inc_sym == trials && inc_comp == trials && structural;
  return {pass, "Nye and dev-sym " + std::to_string(nye) + ", Curl D " + std::to_string(curl_grad) + ", inc sym D " +
                    std::to_string(inc_sym) + ", inc composition " + std::to_string(inc_comp) + " of " +
                    std::to_string(trials) + (structural ? ", operators equal" : ", operators differ")};
}

Outcome kernel_dimensions() {
  const json data = json::parse(embedded::kernel_dims);
  std::size_t ok = 0, total = 0, derived = 0, caps = 0;
  std::string first_failure;
  for (const auto& e : data["entries"]) {
    ++total;
    const std::size_t n = e["n"];
    const PartMap a = domain_part(e["A"], e["base"], n);
    const HomOperator b = assembled_operator(e["B_part"], e["base"], n);
    try {
      const KernelBasis k = kernel_polynomials(a, b);
      bool good = k.dim() == e["dim"].get<std::size_t>() && check_kernel_basis(k, a, b).empty();
      if (e.contains("degree_bound")) good = good && k.degree_bound == e["degree_bound"].get<int>();
      if (good) {
        ++ok;
        if (e["source"] == "computed") ++derived;
      } else if (first_failure.empty()) {
        first_failure = e["A"].get<std::string>() + "/" + e["B_part"].get<std::string>() + " dim " + std::to_string(k.dim());
      }
    } catch (const CapExceeded&) {
      if (first_failure.empty()) first_failure = e["A"].get<std::string>() + "/" + e["B_part"].get<std::string>() + " capped";
    }
  }
  for (const auto& e : data["cap_exceeded"]) {
    ++total;
    try {
      kernel_polynomials(domain_part(e["A"], e["base"], e["n"]), assembled_operator(e["B_part"], e["base"], e["n"]));
      if (first_failure.empty()) first_failure = e["A"].get<std::string>() + "/" + e["B_part"].get<std::string>() + " returned a basis";
    } catch (const CapExceeded&) {
      ++ok;
      ++caps;
    }
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " (" + std::to_string(derived) +
                           " derived goldens re-verified, " + std::to_string(caps) + " cap-exceeded)" +
                           (first_failure.empty() ? "" : ", first failure " + first_failure)};
}

Outcome harness_counterexamples() {
  bool pass = true;
  std::string detail;
  for (const std::string name : {"example-1.1", "example-1.2"}) {
    CampaignOptions opt;
    opt.grids = std::vector<std::size_t>{64};
    const CampaignResult r = run_preset(name, opt);
    const json& run = r.report["runs"][0];
    const double rhs = run["rhs_over_norm"], lhs = run["lhs_over_norm"];
    const bool ok = rhs < 1e-10 && lhs > 1e-2 && run["ratio"] == "inf";
    pass = pass && ok;
    detail += name + " rhs/|P| " + fmt(rhs, 2) + " lhs/|P| " + fmt(lhs, 2) + "; ";
  }
  for (const std::string name : {"scaling-p2-n3", "scaling-p1.5-n3", "scaling-p1.5-n2"}) {
    const CampaignResult r = run_preset(name);
    pass = pass && r.pass;
    detail += name + " q " + fmt(r.report["recovered_q"].get<double>(), 5) + " (err " +
              fmt(100 * r.report["exponent_error"].get<double>(), 2) + "%); ";
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

Outcome inequality_evidence() {
  const auto t0 = std::chrono::steady_clock::now();
  const CampaignResult r = run_preset("kms1-curl-table");
  std::size_t c_ok = 0, c_all = 0, n_ok = 0, n_all = 0;
  double worst_change = 0;
  for (const auto& cell : r.report["cells"]) {
    if (cell["status"] == "C") {
      ++c_all;
      if (cell["pass"] == true) ++c_ok;
      if (cell["relative_change"].is_number()) worst_change = std::max(worst_change, cell["relative_change"].get<double>());
    } else if (cell["status"] == "none") {
      ++n_all;
      if (cell["pass"] == true) ++n_ok;
    }
  }
  return {r.pass && c_ok == c_all && n_ok == n_all,
          std::to_string(c_ok) + "/" + std::to_string(c_all) + " C cells stable (worst change " + fmt(worst_change, 2) +
              "), " + std::to_string(n_ok) + "/" + std::to_string(n_all) + " non-elliptic cells blow up, " +
              fmt(seconds_since(t0)) + " s"};
}

Outcome determinism(const std::string& cli) {
  const std::vector<std::vector<std::string>> commands{
      {"table", "--family", "curl", "--format", "json"},
      {"table", "--family", "div", "--n", "5", "--format", "json"},
      {"classify", "--A", "sym", "--B-part", "skewtr", "--base", "curl", "--seed", "7"},
      {"kernel", "--A", "sym", "--B-part", "devsym", "--base", "curl"},
      {"verify", "--preset", "korn-normalized", "--grid", "32", "--random-fields", "6", "--seed", "7"},
      {"verify", "--A", "dev", "--B-part", "tr", "--grid", "32", "--random-fields", "4", "--bump-fields", "3",
       "--seed", "7"},
  };
  std::size_t same = 0;
  for (const auto& c : commands) {
    const auto a = run_cli_capture(cli, c), b = run_cli_capture(cli, c);
    if (a == b && !a.second.empty()) ++same;
  }
  return {same == commands.size(), std::to_string(same) + "/" + std::to_string(commands.size()) +
                                       " commands byte-identical across two runs" + (cli.empty() ? " (in-process)" : "")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string cli;
  app.add_option("--cli", cli, "path of the kmslab executable");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 table reproduction", [&] { return table_reproduction(cli); }},
      {"2 reference witnesses", reference_witnesses_verify},
      {"3 symbolic identities", symbolic_identities},
      {"4 kernel dimensions", kernel_dimensions},
      {"5 harness counterexamples and scaling", harness_counterexamples},
      {"6 first-kind inequality evidence", inequality_evidence},
      {"7 determinism", [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
