#include "shufflelab/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace shufflelab {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("scenario: " + message);
}

const ordered_json& field(const ordered_json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) fail(std::string("missing field '") + name + "'");
  return *it;
}

std::vector<std::string> string_array(const ordered_json& node, const char* name) {
  if (!node.is_array()) fail(std::string("field '") + name + "' must be an array");
  std::vector<std::string> out;
  for (const auto& item : node) {
    if (!item.is_string()) fail(std::string("field '") + name + "' must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

double number(const ordered_json& node, const std::string& where) {
  if (!node.is_number()) fail("'" + where + "' must be a number");
  return node.get<double>();
}

// symbol -> value object, restricted to known symbols.
std::vector<std::pair<int, double>> symbol_map(const ordered_json& node,
                                               const AlphabetSpec& alphabet,
                                               const char* name) {
  if (!node.is_object()) fail(std::string("field '") + name + "' must be an object");
  std::vector<std::pair<int, double>> out;
  for (auto it = node.begin(); it != node.end(); ++it) {
    int idx;
    try {
      idx = alphabet.index_of(it.key());
    } catch (const std::exception&) {
      fail(std::string("field '") + name + "' names unknown symbol '" + it.key() + "'");
    }
    out.emplace_back(idx, number(it.value(), std::string(name) + "." + it.key()));
  }
  return out;
}

CompositionRule parse_composition(const ordered_json& node) {
  if (!node.is_object()) fail("'composition' must be an object");
  for (auto it = node.begin(); it != node.end(); ++it)
    if (it.key() != "rule" && it.key() != "k" && it.key() != "pairs")
      fail("unknown composition field '" + it.key() + "'");
  const ordered_json& rule = field(node, "rule");
  if (!rule.is_string()) fail("'composition.rule' must be a string");
  std::string kind = rule.get<std::string>();
  if (kind == "proportional") {
    if (node.contains("k") || node.contains("pairs"))
      fail("proportional composition takes no extra fields");
    return CompositionRule::proportional();
  }
  if (kind == "fixed") {
    const ordered_json& k = field(node, "k");
    if (!k.is_number_integer()) fail("'composition.k' must be an integer");
    if (node.contains("pairs")) fail("fixed composition takes no 'pairs'");
    return CompositionRule::fixed(k.get<int>());
  }
  if (kind == "custom") {
    const ordered_json& pairs = field(node, "pairs");
    if (!pairs.is_array()) fail("'composition.pairs' must be an array");
    std::vector<std::pair<int, int>> out;
    for (const auto& entry : pairs) {
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer() ||
          !entry[1].is_number_integer())
        fail("'composition.pairs' entries must be [n, k] integer pairs");
      out.emplace_back(entry[0].get<int>(), entry[1].get<int>());
    }
    return CompositionRule::custom_list(out);
  }
  fail("unknown composition rule '" + kind + "'");
}

}  // namespace

RandomizerScenario parse_scenario_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("document must be a JSON object");
  static const std::set<std::string> known{
      "alphabet", "D0",     "D1", "p0",          "p1",
      "alpha0",   "alpha1", "pi", "composition", "dominant_correction"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (known.find(it.key()) == known.end()) fail("unknown field '" + it.key() + "'");

  RandomizerScenario s;
  s.alphabet = AlphabetSpec::from_symbols(string_array(field(doc, "alphabet"), "alphabet"));
  const std::size_t dim = static_cast<std::size_t>(s.alphabet.size());

  auto parse_side = [&](const char* dname, const char* pname, std::vector<int>& d,
                        std::vector<double>& p) {
    std::vector<std::string> labels = string_array(field(doc, dname), dname);
    std::vector<std::pair<int, double>> weights =
        symbol_map(field(doc, pname), s.alphabet, pname);
    std::vector<std::pair<int, double>> joined;
    for (const std::string& label : labels) {
      int idx = s.alphabet.index_of(label);
      bool found = false;
      for (const auto& [i, w] : weights) {
        if (i == idx) {
          joined.emplace_back(i, w);
          found = true;
        }
      }
      if (!found)
        fail(std::string("'") + pname + "' is missing symbol '" + label + "'");
    }
    if (joined.size() != weights.size())
      fail(std::string("'") + pname + "' names symbols outside " + dname);
    std::sort(joined.begin(), joined.end());
    for (const auto& [i, w] : joined) {
      d.push_back(i);
      p.push_back(w);
    }
  };
  parse_side("D0", "p0", s.ds.d0, s.ds.p0);
  parse_side("D1", "p1", s.ds.d1, s.ds.p1);

  s.ds.alpha0.assign(dim, 0.0);
  s.ds.alpha1.assign(dim, 0.0);
  for (const auto& [i, a] : symbol_map(field(doc, "alpha0"), s.alphabet, "alpha0"))
    s.ds.alpha0[static_cast<std::size_t>(i)] = a;
  for (const auto& [i, a] : symbol_map(field(doc, "alpha1"), s.alphabet, "alpha1"))
    s.ds.alpha1[static_cast<std::size_t>(i)] = a;

  if (doc.contains("dominant_correction")) {
    const ordered_json& corr = doc["dominant_correction"];
    if (!corr.is_object()) fail("'dominant_correction' must be an object");
    for (auto it = corr.begin(); it != corr.end(); ++it)
      if (it.key() != "0" && it.key() != "1")
        fail("'dominant_correction' keys must be \"0\" or \"1\"");
    if (corr.contains("0")) {
      s.correction0.assign(dim, 0.0);
      for (const auto& [i, c] :
           symbol_map(corr["0"], s.alphabet, "dominant_correction.0"))
        s.correction0[static_cast<std::size_t>(i)] = c;
    }
    if (corr.contains("1")) {
      s.correction1.assign(dim, 0.0);
      for (const auto& [i, c] :
           symbol_map(corr["1"], s.alphabet, "dominant_correction.1"))
        s.correction1[static_cast<std::size_t>(i)] = c;
    }
  }

  s.pi_limit = number(field(doc, "pi"), "pi");
  s.composition = parse_composition(field(doc, "composition"));
  s.validate();
  return s;
}

RandomizerScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("scenario: cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str());
}

std::string scenario_to_json(const RandomizerScenario& scenario) {
  const AlphabetSpec& a = scenario.alphabet;
  ordered_json doc;
  doc["alphabet"] = a.symbols;
  auto side = [&](const std::vector<int>& d, const std::vector<double>& p) {
    ordered_json labels = ordered_json::array();
    ordered_json weights = ordered_json::object();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string& sym = a.symbols[static_cast<std::size_t>(d[i])];
      labels.push_back(sym);
      weights[sym] = p[i];
    }
    return std::pair<ordered_json, ordered_json>(labels, weights);
  };
  auto [d0, p0] = side(scenario.ds.d0, scenario.ds.p0);
  auto [d1, p1] = side(scenario.ds.d1, scenario.ds.p1);
  doc["D0"] = d0;
  doc["D1"] = d1;
  doc["p0"] = p0;
  doc["p1"] = p1;
  auto sparse = [&](const std::vector<double>& alpha) {
    ordered_json out = ordered_json::object();
    for (std::size_t i = 0; i < alpha.size(); ++i)
      if (alpha[i] != 0.0) out[a.symbols[i]] = alpha[i];
    return out;
  };
  doc["alpha0"] = sparse(scenario.ds.alpha0);
  doc["alpha1"] = sparse(scenario.ds.alpha1);
  bool any_corr = false;
  for (double c : scenario.correction0) any_corr = any_corr || c != 0.0;
  for (double c : scenario.correction1) any_corr = any_corr || c != 0.0;
  if (any_corr) {
    ordered_json corr = ordered_json::object();
    if (!scenario.correction0.empty()) corr["0"] = sparse(scenario.correction0);
    if (!scenario.correction1.empty()) corr["1"] = sparse(scenario.correction1);
    doc["dominant_correction"] = corr;
  }
  doc["pi"] = scenario.pi_limit;
  ordered_json comp = ordered_json::object();
  switch (scenario.composition.kind) {
    case CompositionRule::Kind::Proportional:
      comp["rule"] = "proportional";
      break;
    case CompositionRule::Kind::Fixed:
      comp["rule"] = "fixed";
      comp["k"] = scenario.composition.fixed_k;
      break;
    case CompositionRule::Kind::CustomList: {
      comp["rule"] = "custom";
      ordered_json pairs = ordered_json::array();
      for (const auto& [n, k] : scenario.composition.custom)
        pairs.push_back(ordered_json::array({n, k}));
      comp["pairs"] = pairs;
      break;
    }
  }
  doc["composition"] = comp;
  return doc.dump(2) + "\n";
}

namespace {

ordered_json vec_json(const Vec& v) {
  ordered_json out = ordered_json::array();
  for (double x : v) out.push_back(x);
  return out;
}

ordered_json mat_json(const Mat& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

ordered_json symbol_lists(const std::vector<std::vector<int>>& groups,
                          const AlphabetSpec& alphabet) {
  ordered_json out = ordered_json::array();
  for (const auto& group : groups) {
    ordered_json names = ordered_json::array();
    for (int i : group) names.push_back(alphabet.symbols[static_cast<std::size_t>(i)]);
    out.push_back(names);
  }
  return out;
}

}  // namespace

std::string geometry_to_json(const QuotientGeometry& geometry,
                             const AlphabetSpec& alphabet) {
  ordered_json doc;
  doc["alphabet"] = alphabet.symbols;
  doc["pi"] = geometry.pi;
  doc["disjoint"] = geometry.disjoint();
  doc["components"] = symbol_lists(geometry.components, alphabet);
  doc["rare_classes"] = symbol_lists(geometry.rare_classes, alphabet);
  doc["mu0"] = vec_json(geometry.mu0);
  doc["mu1"] = vec_json(geometry.mu1);
  doc["m0"] = vec_json(geometry.m0);
  doc["m1"] = vec_json(geometry.m1);
  doc["delta_shift"] = vec_json(geometry.delta_shift);
  doc["proj_g"] = mat_json(geometry.proj_g);
  doc["proj_j"] = mat_json(geometry.proj_j);
  doc["gamma0"] = mat_json(geometry.gamma0);
  doc["gamma1"] = mat_json(geometry.gamma1);
  doc["sigma"] = mat_json(geometry.sigma);
  ordered_json jumps = ordered_json::array();
  for (const JumpVector& j : geometry.jumps) {
    ordered_json entry;
    entry["source"] = j.source;
    entry["symbol"] = alphabet.symbols[static_cast<std::size_t>(j.symbol)];
    entry["vector"] = vec_json(j.vector);
    entry["group"] = j.group_id;
    jumps.push_back(entry);
  }
  doc["jumps"] = jumps;
  ordered_json atoms = ordered_json::array();
  for (const LevyAtom& atom : geometry.levy_atoms) {
    ordered_json entry;
    entry["weight"] = atom.weight;
    entry["vector"] = vec_json(atom.vector);
    entry["group"] = atom.group_id;
    atoms.push_back(entry);
  }
  doc["levy_atoms"] = atoms;
  return doc.dump(2) + "\n";
}

std::string law_to_csv(const DiscreteDistribution& law,
                       const std::vector<std::string>& key_headers) {
  if (static_cast<int>(key_headers.size()) != law.key_dim())
    throw std::invalid_argument("law_to_csv: header count does not match key dimension");
  std::ostringstream out;
  for (std::size_t i = 0; i < key_headers.size(); ++i) {
    if (i) out << ',';
    out << key_headers[i];
  }
  const int edim = law.has_embedding() ? law.embed_dim() : 0;
  for (int e = 0; e < edim; ++e) out << ",embed_" << e;
  out << ",mass,deficit\n";
  const std::string deficit = format_double(law.deficit());
  for (std::size_t i = 0; i < law.atoms().size(); ++i) {
    const Atom& atom = law.atoms()[i];
    for (std::size_t j = 0; j < atom.key.size(); ++j) {
      if (j) out << ',';
      out << atom.key[j];
    }
    if (edim > 0) {
      Vec point = law.embedded_point(i);
      for (double x : point) out << ',' << format_double(x);
    }
    out << ',' << format_double(atom.mass) << ',' << deficit << '\n';
  }
  return out.str();
}

std::string transcript_law_to_csv(const TranscriptLaw& law, const AlphabetSpec& alphabet) {
  return law_to_csv(law.law, alphabet.symbols);
}

}  // namespace shufflelab
