#include "hclab/operator_spec.hpp"

#include "hclab/errors.hpp"
#include "hclab/rng.hpp"

#include <fstream>
#include <sstream>

namespace hclab {

using nlohmann::json;

namespace {

bool has(const json& p, const char* key) { return p.is_object() && p.contains(key) && !p.at(key).is_null(); }

double number_field(const json& p, const char* key, double fallback) {
  if (!has(p, key)) return fallback;
  const json& v = p.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return std::stod(v.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  fail(ErrorKind::SpecParse, std::string("field '") + key + "' must be a number");
}

std::vector<cplx> complex_list(const json& v, const char* what) {
  if (v.is_string()) return parse_complex_list(v.get<std::string>());
  if (!v.is_array()) fail(ErrorKind::SpecParse, std::string(what) + " must be a list");
  std::vector<cplx> out;
  out.reserve(v.size());
  for (const json& x : v) out.push_back(complex_from_json(x));
  return out;
}

std::vector<Index> index_list(const json& v, const char* what) {
  std::vector<Index> out;
  if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        out.push_back(static_cast<Index>(std::stoll(tok)));
      } catch (const std::exception&) {
        fail(ErrorKind::SpecParse, std::string("bad integer in ") + what + ": '" + tok + "'");
      }
    }
    return out;
  }
  if (!v.is_array()) fail(ErrorKind::SpecParse, std::string(what) + " must be a list");
  for (const json& x : v) {
    if (!x.is_number_integer()) fail(ErrorKind::SpecParse, std::string(what) + " entries must be integers");
    out.push_back(x.get<Index>());
  }
  return out;
}

// Explicit weights, or seeded random ones when absent or "random".
std::vector<cplx> weights_field(const json& p, Index n, const ToleranceConfig& cfg) {
  if (has(p, "weights") && !(p.at("weights").is_string() && p.at("weights").get<std::string>() == "random"))
    return complex_list(p.at("weights"), "weights");
  SeededRng rng(cfg.seed);
  return random_weights(static_cast<std::size_t>(std::max<Index>(n - 1, 0)), rng);
}

}  // namespace

const std::vector<std::string>& known_families() {
  static const std::vector<std::string> names = {"weighted_shift", "shift_plus_rank_one", "projection_product",
                                                 "composition",    "aq",                  "matrix",
                                                 "hardy",          "isometry",            "cauchy_dual"};
  return names;
}

std::vector<cplx> parse_complex_list(const std::string& text) {
  std::vector<cplx> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto first = tok.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = tok.find_last_not_of(" \t");
    try {
      out.push_back(parse_complex(tok.substr(first, last - first + 1)));
    } catch (const Error& e) {
      fail(ErrorKind::SpecParse, e.what());
    }
  }
  return out;
}

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object() && j.contains("re")) {
    const double im = j.contains("im") ? j.at("im").get<double>() : 0.0;
    return {j.at("re").get<double>(), im};
  }
  if (j.is_string()) {
    try {
      return parse_complex(j.get<std::string>());
    } catch (const Error& e) {
      fail(ErrorKind::SpecParse, e.what());
    }
  }
  fail(ErrorKind::SpecParse, "cannot read a complex number from " + j.dump());
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

CMatrix matrix_from_json(const json& j) {
  if (j.is_string()) {
    try {
      return parse_matrix(j.get<std::string>());
    } catch (const Error& e) {
      fail(ErrorKind::SpecParse, e.what());
    }
  }
  if (!j.is_array() || j.empty() || !j[0].is_array())
    fail(ErrorKind::SpecParse, "a matrix must be matrix text or a nested array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      fail(ErrorKind::SpecParse, "matrix rows have unequal length");
    for (Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<size_t>(c)]);
  }
  return m;
}

OperatorSpec parse_operator_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorKind::SpecParse, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::SpecParse, "operator spec must be a JSON object");
  if (!doc.contains("family") || !doc.at("family").is_string())
    fail(ErrorKind::SpecParse, "operator spec needs a string field 'family'");

  OperatorSpec spec;
  spec.family = doc.at("family").get<std::string>();
  bool known = false;
  for (const auto& f : known_families()) known = known || f == spec.family;
  if (!known) fail(ErrorKind::SpecParse, "unknown family '" + spec.family + "'");

  if (doc.contains("params")) {
    if (!doc.at("params").is_object()) fail(ErrorKind::SpecParse, "'params' must be an object");
    spec.params = doc.at("params");
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() == "family" || it.key() == "params" || it.key() == "N") continue;
    spec.params[it.key()] = it.value();
  }
  if (doc.contains("N")) {
    if (!doc.at("N").is_number_integer()) fail(ErrorKind::SpecParse, "'N' must be an integer");
    spec.n = doc.at("N").get<Index>();
  } else if (has(spec.params, "weights") && spec.params.at("weights").is_array()) {
    spec.n = static_cast<Index>(spec.params.at("weights").size()) + 1;
  } else if (has(spec.params, "matrix") || has(spec.params, "P")) {
    spec.n = 0;  // taken from the matrix
  }
  return spec;
}

OperatorSpec load_operator_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::SpecParse, "cannot open spec file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_operator_spec(buf.str());
}

json spec_to_json(const OperatorSpec& spec) {
  return json{{"family", spec.family}, {"N", spec.n}, {"params", spec.params}};
}

OperatorModel build_operator(const OperatorSpec& spec, const ToleranceConfig& cfg) {
  const json& p = spec.params;
  const std::string& f = spec.family;
  try {
    if (f == "weighted_shift") return weighted_shift(weights_field(p, spec.n, cfg), spec.n);
    if (f == "isometry") return weighted_shift(std::vector<cplx>(static_cast<size_t>(std::max<Index>(spec.n - 1, 0)), 1.0), spec.n);
    if (f == "shift_plus_rank_one") {
      const cplx a = has(p, "a") ? complex_from_json(p.at("a")) : cplx(0.3, 0.4);
      const Index column = static_cast<Index>(number_field(p, "index", 2.0));
      return shift_plus_rank_one(weights_field(p, spec.n, cfg), a, column, spec.n);
    }
    if (f == "hardy") return hardy_example(has(p, "a") ? complex_from_json(p.at("a")) : cplx(0.5, 0.0), spec.n);
    if (f == "projection_product") {
      if (!has(p, "P") || !has(p, "Q")) fail(ErrorKind::SpecParse, "projection_product needs 'P' and 'Q'");
      return projection_product(matrix_from_json(p.at("P")), matrix_from_json(p.at("Q")));
    }
    if (f == "composition") {
      if (!has(p, "psi") || !has(p, "xi")) fail(ErrorKind::SpecParse, "composition needs 'psi' and 'xi'");
      const auto psi = index_list(p.at("psi"), "psi");
      const auto xi = complex_list(p.at("xi"), "xi");
      return composition_operator(psi, xi, static_cast<Index>(psi.size()));
    }
    if (f == "aq") {
      const double q = number_field(p, "q", 0.5);
      const double r = number_field(p, "r", default_aq_r(q));
      return aq_operator(q, r, spec.n, cfg.rank_tol);
    }
    if (f == "matrix") {
      if (!has(p, "matrix")) fail(ErrorKind::SpecParse, "matrix family needs 'matrix'");
      return matrix_model(matrix_from_json(p.at("matrix")));
    }
    if (f == "cauchy_dual") {
      if (!has(p, "base") || !p.at("base").is_object()) fail(ErrorKind::SpecParse, "cauchy_dual needs an object 'base'");
      json base = p.at("base");
      if (!base.contains("N")) base["N"] = spec.n;
      return cauchy_dual(build_operator(parse_operator_spec(base.dump()), cfg), cfg);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::SpecParse, std::string("bad parameter: ") + e.what());
  }
  fail(ErrorKind::SpecParse, "unknown family '" + f + "'");
}

}  // namespace hclab
