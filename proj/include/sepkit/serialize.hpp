#pragma once

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sepkit/dyadic.hpp"
#include "sepkit/errors.hpp"
#include "sepkit/groundset.hpp"
#include "sepkit/harness.hpp"
#include "sepkit/oracle.hpp"
#include "sepkit/preference.hpp"
#include "sepkit/tree.hpp"

namespace sepkit {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Subsets and characters
// ---------------------------------------------------------------------------

inline Json to_json(Subset s) { return Json(elements(s)); }

inline Subset subset_from_json(const Json& j, GroundSize g) {
  if (!j.is_array()) throw parse_error("subset must be a JSON array of integers");
  std::vector<int> elems;
  for (const auto& item : j) {
    if (!item.is_number_integer()) {
      throw parse_error("subset elements must be integers");
    }
    elems.push_back(item.get<int>());
  }
  try {
    return subset_of(elems, g);
  } catch (const std::domain_error& e) {
    throw parse_error(e.what());
  }
}

inline Json to_json(const Character& ch) {
  Json sets = Json::array();
  for (const Subset s : ch.sets) sets.push_back(to_json(s));
  return Json{{"n", ch.n}, {"sets", sets}};
}

/// Reads {"n": ..., "sets": [[...], ...]}.  The empty set may be present or
/// absent in the file; the returned character always includes it.
inline Character character_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("sets")) {
    throw parse_error("character file must be an object with \"n\" and \"sets\"");
  }
  if (!j["n"].is_number_integer()) throw parse_error("\"n\" must be an integer");
  const int n = j["n"].get<int>();
  if (n < 1 || n > max_ground_size()) {
    throw parse_error("\"n\" must be in 1.." + std::to_string(max_ground_size()) +
                      ", got " + std::to_string(n));
  }
  const GroundSize g(n);
  if (!j["sets"].is_array()) throw parse_error("\"sets\" must be an array");
  Character ch{n, {Subset{0}}};
  for (const auto& item : j["sets"]) {
    const Subset s = subset_from_json(item, g);
    if (!ch.contains(s)) ch.sets.push_back(s);
  }
  std::sort(ch.sets.begin(), ch.sets.end(),
            [&](Subset a, Subset b) { return rank(a, g) < rank(b, g); });
  return ch;
}

// ---------------------------------------------------------------------------
// Dyadics
// ---------------------------------------------------------------------------

inline Json to_json(const Dyadic& d) {
  return Json{{"m", d.mantissa().str()}, {"e", d.exponent()}};
}

inline Dyadic dyadic_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("m") || !j.contains("e") || !j["e"].is_number_integer()) {
    throw parse_error("dyadic must be {\"m\": \"<decimal>\", \"e\": <int>}");
  }
  BigInt m;
  try {
    if (j["m"].is_string()) {
      m = BigInt(j["m"].get<std::string>());
    } else if (j["m"].is_number_integer()) {
      m = BigInt(j["m"].get<long long>());
    } else {
      throw parse_error("dyadic mantissa must be a decimal string or integer");
    }
  } catch (const std::runtime_error&) {
    throw parse_error("cannot parse dyadic mantissa");
  }
  return Dyadic::from_parts(std::move(m), j["e"].get<long long>());
}

// ---------------------------------------------------------------------------
// Vector files.  Text form, bit exact:
//   n=<n>
//   <bitstring> <mantissa> <exponent> [ignored extra columns]
// in reverse-lexicographic bitstring order.  The JSON form mirrors the same
// fields.  An optional decimal column is attached for humans and is never
// re-parsed.
// ---------------------------------------------------------------------------

inline void write_vector_text(std::ostream& out, const PreferenceVector& p,
                              int decimal_digits = -1) {
  const GroundSize g(p.n);
  out << "n=" << p.n << "\n";
  for (const Outcome x : display_order(g)) {
    const Dyadic& entry = p.at(x);
    out << to_bitstring(x, g) << " " << entry.mantissa().str() << " " << entry.exponent();
    if (decimal_digits >= 0) out << " " << entry.decimal(decimal_digits);
    out << "\n";
  }
}

inline PreferenceVector read_vector_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw parse_error("empty vector file");
  if (line.rfind("n=", 0) != 0) throw parse_error("vector file must start with n=<n>");
  int n = 0;
  try {
    n = std::stoi(line.substr(2));
  } catch (const std::exception&) {
    throw parse_error("cannot parse ground size in \"" + line + "\"");
  }
  if (n < 1 || n > max_ground_size()) {
    throw parse_error("vector file ground size out of range: " + std::to_string(n));
  }
  const GroundSize g(n);
  PreferenceVector p{n, std::vector<Dyadic>(g.outcome_count())};
  std::vector<bool> seen(g.outcome_count(), false);
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string bits, mantissa;
    long long exponent = 0;
    if (!(fields >> bits >> mantissa >> exponent)) {
      throw parse_error("bad vector line \"" + line + "\"");
    }
    const Outcome x = parse_outcome(bits, g);
    if (seen[x.bits]) throw parse_error("duplicate outcome " + bits);
    seen[x.bits] = true;
    try {
      p.entries[x.bits] = Dyadic::from_parts(BigInt(mantissa), exponent);
    } catch (const std::runtime_error&) {
      throw parse_error("cannot parse mantissa \"" + mantissa + "\"");
    }
    ++count;
  }
  if (count != g.outcome_count()) {
    throw parse_error("vector file has " + std::to_string(count) + " entries, expected " +
                      std::to_string(g.outcome_count()));
  }
  return p;
}

inline Json to_json(const PreferenceVector& p) {
  const GroundSize g(p.n);
  Json entries = Json::array();
  for (const Outcome x : display_order(g)) {
    const Dyadic& entry = p.at(x);
    entries.push_back(Json{{"outcome", to_bitstring(x, g)},
                           {"m", entry.mantissa().str()},
                           {"e", entry.exponent()}});
  }
  return Json{{"n", p.n}, {"entries", entries}};
}

inline PreferenceVector vector_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("entries")) {
    throw parse_error("vector JSON must have \"n\" and \"entries\"");
  }
  const int n = j["n"].is_number_integer() ? j["n"].get<int>() : 0;
  if (n < 1 || n > max_ground_size()) {
    throw parse_error("vector JSON ground size out of range");
  }
  const GroundSize g(n);
  PreferenceVector p{n, std::vector<Dyadic>(g.outcome_count())};
  std::vector<bool> seen(g.outcome_count(), false);
  std::size_t count = 0;
  for (const auto& item : j["entries"]) {
    if (!item.is_object() || !item.contains("outcome")) {
      throw parse_error("vector entry must be an object with \"outcome\"");
    }
    const Outcome x = parse_outcome(item["outcome"].get<std::string>(), g);
    if (seen[x.bits]) {
      throw parse_error("duplicate outcome " + item["outcome"].get<std::string>());
    }
    seen[x.bits] = true;
    p.entries[x.bits] = dyadic_from_json(item);
    ++count;
  }
  if (count != g.outcome_count()) {
    throw parse_error("vector JSON has " + std::to_string(count) + " entries, expected " +
                      std::to_string(g.outcome_count()));
  }
  return p;
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw parse_error("malformed JSON in " + origin);
  return j;
}

/// Reads a vector file, sniffing JSON versus the text format.
inline PreferenceVector read_vector_file(const std::string& path) {
  const std::string text = slurp(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return vector_from_json(parse_json_text(text, path));
  }
  std::istringstream in(text);
  return read_vector_text(in);
}

inline Character read_character_file(const std::string& path) {
  return character_from_json(parse_json_text(slurp(path), path));
}

// ---------------------------------------------------------------------------
// Ledgers, witnesses, reports
// ---------------------------------------------------------------------------

inline Json to_json(const CoefficientLedger& ledger) {
  Json c = Json::array();
  for (const auto& [set, value] : ledger.c) {
    c.push_back(Json{{"set", to_json(set)}, {"coef", to_json(value)}});
  }
  Json d = Json::array();
  for (const auto& [set, value] : ledger.d) {
    d.push_back(Json{{"set", to_json(set)}, {"coef", to_json(value)}});
  }
  return Json{{"n", ledger.ground.n},
              {"alpha", to_json(alpha(ledger.ground))},
              {"d_shift", ledger.d_shift},
              {"c", c},
              {"d", d}};
}

inline std::string format_witness(const Witness& w, GroundSize g) {
  std::ostringstream out;
  out << "set " << to_text(w.set) << "\n";
  out << "xS " << to_bitstring(w.x_s) << "\n";
  out << "yS " << to_bitstring(w.y_s) << "\n";
  out << "u " << (w.u.support == 0 ? std::string("-") : to_bitstring(w.u)) << "\n";
  out << "v " << (w.v.support == 0 ? std::string("-") : to_bitstring(w.v)) << "\n";
  const Word xu = w.x_s.bits | w.u.bits;
  const Word yu = w.y_s.bits | w.u.bits;
  const Word xv = w.x_s.bits | w.v.bits;
  const Word yv = w.y_s.bits | w.v.bits;
  out << "outcomes " << to_bitstring(Outcome{xu}, g) << " vs " << to_bitstring(Outcome{yu}, g)
      << " then " << to_bitstring(Outcome{xv}, g) << " vs " << to_bitstring(Outcome{yv}, g)
      << "\n";
  return out.str();
}

inline Json to_json(const Witness& w) {
  return Json{{"set", to_json(w.set)},
              {"xS", to_bitstring(w.x_s)},
              {"yS", to_bitstring(w.y_s)},
              {"u", to_bitstring(w.u)},
              {"v", to_bitstring(w.v)}};
}

inline Json to_json(const CertifyReport& report) {
  Json missing = Json::array();
  for (const auto& [set, witness] : report.missing) {
    missing.push_back(Json{{"set", to_json(set)}, {"witness", to_json(witness)}});
  }
  Json spurious = Json::array();
  for (const Subset s : report.spurious) spurious.push_back(to_json(s));
  return Json{{"match", report.match},
              {"expected", to_json(report.expected)},
              {"actual", to_json(report.actual)},
              {"missing", missing},
              {"spurious", spurious}};
}

/// Indented rendering of the haunted Hasse diagram, ghosts marked.
inline std::string format_hasse(const TreeCharacter& tc) {
  std::ostringstream out;
  const auto render = [&](int index, int depth, const auto& self) -> void {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << to_text(tc.sets[index])
        << "\n";
    std::vector<int> kids = tc.children[index];
    std::sort(kids.begin(), kids.end(), [&](int a, int b) {
      return rank(tc.sets[a], tc.ground) < rank(tc.sets[b], tc.ground);
    });
    for (const int child : kids) self(child, depth + 1, self);
    if (tc.ghost[index] != 0) {
      out << std::string(static_cast<std::size_t>(depth + 1) * 2, ' ')
          << to_text(Subset{tc.ghost[index]}) << " (ghost)\n";
    }
  };
  render(tc.root_index(), 0, render);
  return out.str();
}

inline Json to_json(const CensusResult& res) {
  const GroundSize g(res.n);
  const auto families = [&](const std::vector<FamilyKey>& keys) {
    Json out = Json::array();
    for (const FamilyKey key : keys) out.push_back(to_json(family_from_key(key, g))["sets"]);
    return out;
  };
  return Json{{"n", res.n},
              {"order_count", res.order_count},
              {"admissible_count", res.admissible.size()},
              {"candidate_count", res.candidates.size()},
              {"match", res.match()},
              {"admissible", families(res.admissible)},
              {"admissible_only", families(res.admissible_only)},
              {"candidates_only", families(res.candidates_only)}};
}

inline Json to_json(const SuiteReport& report) {
  Json checks = Json::array();
  for (const auto& check : report.checks) {
    checks.push_back(Json{{"name", check.name}, {"ok", check.ok}, {"detail", check.detail}});
  }
  return Json{{"suite", report.suite},
              {"ok", report.ok()},
              {"passed", report.passed()},
              {"failed", report.failed()},
              {"checks", checks}};
}

inline std::string format_suite(const SuiteReport& report) {
  std::ostringstream out;
  for (const auto& check : report.checks) {
    out << (check.ok ? "PASS" : "FAIL") << " " << report.suite << ": " << check.name;
    if (!check.detail.empty()) out << " (" << check.detail << ")";
    out << "\n";
  }
  out << (report.ok() ? "OK" : "FAILED") << " " << report.passed() << "/"
      << report.checks.size() << " checks\n";
  return out.str();
}

}  // namespace sepkit
