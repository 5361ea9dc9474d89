// sepkit — exact separability toolkit for preference orders on the power
// set of [n].
//
// Subcommands:
//   build    assemble the preference vector of a tree character
//   char     compute the character (all separable sets) of a vector
//   check    certify that a tree character's vector realizes it exactly
//   witness  print a nonseparability witness for one set
//   hasse    print the haunted Hasse diagram of a tree character
//   basis    emit a voter basis vector
//   census   exhaustive admissibility census (n <= 3)
//   suite    run a named verification suite
//   detw     exact determinant of the Walsh sign matrix (n <= 4)
//
// Exit codes: 0 success/verified, 1 verification mismatch, 2 usage or input
// error.  Data goes to stdout, diagnostics to stderr.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sepkit/sepkit.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitError = 2;

void apply_max_n_override() {
  const char* raw = std::getenv("SEPKIT_MAX_N");
  if (raw == nullptr || *raw == '\0') return;
  try {
    const int cap = std::stoi(raw);
    sepkit::set_max_ground_size(cap);
    std::cerr << "sepkit: warning: SEPKIT_MAX_N=" << cap
              << " overrides the default ground-size cap; the oracle costs about 6^n"
              << " comparisons\n";
  } catch (const std::exception& e) {
    std::cerr << "sepkit: warning: ignoring SEPKIT_MAX_N: " << e.what() << "\n";
  }
}

/// Parses "1,2,3"; "-" denotes the empty set.
sepkit::Subset parse_set_literal(const std::string& text, sepkit::GroundSize g) {
  if (text == "-") return sepkit::Subset{0};
  std::vector<int> elems;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    try {
      elems.push_back(std::stoi(token));
    } catch (const std::exception&) {
      throw sepkit::parse_error("bad set literal \"" + text + "\"");
    }
  }
  try {
    return sepkit::subset_of(elems, g);
  } catch (const std::domain_error& e) {
    throw sepkit::parse_error(e.what());
  }
}

void write_text_output(const std::string& path, const std::string& payload) {
  if (path.empty() || path == "-") {
    std::cout << payload;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sepkit::io_error("cannot write " + path);
  out << payload;
}

sepkit::TreeCharacter load_tree_character(const std::string& path) {
  const sepkit::Character ch = sepkit::read_character_file(path);
  std::vector<sepkit::Subset> family(ch.sets.begin(), ch.sets.end());
  return sepkit::validate_tree_character(family, sepkit::GroundSize(ch.n));
}

std::string vector_payload(const sepkit::PreferenceVector& v, bool as_json, int decimal) {
  if (as_json) return sepkit::to_json(v).dump(2) + "\n";
  std::ostringstream out;
  sepkit::write_vector_text(out, v, decimal);
  return out.str();
}

int run(int argc, char** argv) {
  CLI::App app{"exact separability toolkit for preferences on the power set of [n]"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "assemble the vector of a tree character");
  std::string build_input;
  std::string build_output;
  std::string build_ledger;
  int build_decimal = -1;
  bool build_json = false;
  build->add_option("character", build_input, "character JSON file")->required();
  build->add_option("-o,--out", build_output, "output vector file (default stdout)");
  build->add_option("--ledger", build_ledger, "write the coefficient ledger JSON here");
  build->add_option("--decimal", build_decimal, "append a human decimal column");
  build->add_flag("--json", build_json, "emit the vector as JSON");

  // char
  auto* charcmd = app.add_subcommand("char", "compute the character of a vector");
  std::string char_input;
  int char_jobs = 1;
  charcmd->add_option("vector", char_input, "vector file (text or JSON)")->required();
  charcmd->add_option("-j,--jobs", char_jobs, "worker threads");

  // check
  auto* check = app.add_subcommand("check", "certify a tree character end to end");
  std::string check_input;
  int check_jobs = 1;
  check->add_option("character", check_input, "character JSON file")->required();
  check->add_option("-j,--jobs", check_jobs, "worker threads");

  // witness
  auto* witness = app.add_subcommand("witness", "nonseparability witness for one set");
  std::string witness_input;
  std::string witness_set;
  witness->add_option("vector", witness_input, "vector file (text or JSON)")->required();
  witness->add_option("--set", witness_set, "set literal, e.g. 2,3 (\"-\" for empty)")
      ->required();

  // hasse
  auto* hasse = app.add_subcommand("hasse", "print the haunted Hasse diagram");
  std::string hasse_input;
  hasse->add_option("character", hasse_input, "character JSON file")->required();

  // basis
  auto* basis = app.add_subcommand("basis", "emit a voter basis vector");
  int basis_n = 0;
  std::string basis_set;
  std::string basis_output;
  bool basis_json = false;
  basis->add_option("--n", basis_n, "ground-set size")->required();
  basis->add_option("--set", basis_set, "index set literal, e.g. 1,2 (\"-\" for empty)")
      ->required();
  basis->add_option("-o,--out", basis_output, "output file (default stdout)");
  basis->add_flag("--json", basis_json, "emit the vector as JSON");

  // census
  auto* census = app.add_subcommand("census", "exhaustive admissibility census (n <= 3)");
  int census_n = 0;
  std::string census_out;
  int census_jobs = 1;
  census->add_option("--n", census_n, "ground-set size (1..3)")->required();
  census->add_option("--out", census_out, "also write the full JSON report here");
  census->add_option("-j,--jobs", census_jobs, "worker threads");

  // suite
  auto* suite = app.add_subcommand("suite", "run a named verification suite");
  std::string suite_name;
  bool suite_json = false;
  int suite_jobs = 1;
  suite->add_option("name", suite_name, "suite name (see --list)")->required();
  suite->add_flag("--json", suite_json, "emit the report as JSON");
  suite->add_option("-j,--jobs", suite_jobs, "worker threads");

  // detw
  auto* detw = app.add_subcommand("detw", "determinant of the Walsh sign matrix");
  int detw_n = 0;
  detw->add_option("--n", detw_n, "ground-set size (1..4)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "sepkit: error [E_USAGE]: " << e.what() << "\n";
    return kExitError;
  }

  if (build->parsed()) {
    const sepkit::TreeCharacter tc = load_tree_character(build_input);
    const auto [vector, ledger] = sepkit::build_preference(tc);
    write_text_output(build_output, vector_payload(vector, build_json, build_decimal));
    if (!build_ledger.empty()) {
      write_text_output(build_ledger, sepkit::to_json(ledger).dump(2) + "\n");
    }
    return kExitOk;
  }

  if (charcmd->parsed()) {
    const sepkit::PreferenceVector v = sepkit::read_vector_file(char_input);
    const sepkit::Character ch = sepkit::character(v, char_jobs);
    std::cout << sepkit::to_json(ch).dump(2) << "\n";
    return kExitOk;
  }

  if (check->parsed()) {
    const sepkit::TreeCharacter tc = load_tree_character(check_input);
    const sepkit::CertifyReport report = sepkit::certify(tc, check_jobs);
    std::cout << sepkit::to_json(report).dump(2) << "\n";
    if (!report.match) {
      std::cerr << "sepkit: check failed: " << report.missing.size()
                << " member sets nonseparable, " << report.spurious.size()
                << " spurious separable sets\n";
      return kExitMismatch;
    }
    return kExitOk;
  }

  if (witness->parsed()) {
    const sepkit::PreferenceVector v = sepkit::read_vector_file(witness_input);
    const sepkit::GroundSize g(v.n);
    const sepkit::Subset s = parse_set_literal(witness_set, g);
    const auto found = sepkit::nonsep_witness(v, s);
    if (!found.has_value()) {
      std::cout << "separable " << sepkit::to_text(s) << "\n";
      return kExitOk;
    }
    std::cout << "nonseparable " << sepkit::to_text(s) << "\n"
              << sepkit::format_witness(*found, g);
    return kExitOk;
  }

  if (hasse->parsed()) {
    std::cout << sepkit::format_hasse(load_tree_character(hasse_input));
    return kExitOk;
  }

  if (basis->parsed()) {
    const sepkit::GroundSize g(basis_n);
    const sepkit::Subset a = parse_set_literal(basis_set, g);
    const sepkit::PreferenceVector v = sepkit::voter_basis_vector(a, g);
    write_text_output(basis_output, vector_payload(v, basis_json, -1));
    return kExitOk;
  }

  if (census->parsed()) {
    const sepkit::CensusResult result = sepkit::census(sepkit::GroundSize(census_n),
                                                       census_jobs);
    const sepkit::Json report = sepkit::to_json(result);
    if (!census_out.empty()) write_text_output(census_out, report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    if (!result.match()) {
      std::cerr << "sepkit: census mismatch at n=" << census_n << "\n";
      return kExitMismatch;
    }
    return kExitOk;
  }

  if (suite->parsed()) {
    const sepkit::SuiteReport report = sepkit::run_suite(suite_name, suite_jobs);
    if (suite_json) {
      std::cout << sepkit::to_json(report).dump(2) << "\n";
    } else {
      std::cout << sepkit::format_suite(report);
    }
    return report.ok() ? kExitOk : kExitMismatch;
  }

  if (detw->parsed()) {
    const sepkit::Dyadic det = sepkit::walsh_det(sepkit::GroundSize(detw_n));
    std::cout << det.decimal(0) << "\n";
    return kExitOk;
  }

  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  apply_max_n_override();
  try {
    return run(argc, argv);
  } catch (const sepkit::error& e) {
    std::cerr << "sepkit: error [" << e.code() << "]: " << e.what() << "\n";
    return kExitError;
  } catch (const std::domain_error& e) {
    std::cerr << "sepkit: error [E_INPUT]: " << e.what() << "\n";
    return kExitError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "sepkit: error [E_INPUT]: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "sepkit: error [E_INTERNAL]: " << e.what() << "\n";
    return kExitError;
  }
}
