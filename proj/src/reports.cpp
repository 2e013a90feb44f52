#include "hclab/reports.hpp"

#include <cmath>
#include <sstream>

namespace hclab {

namespace {

ReportJson vec_json(const RVector& v) {
  ReportJson out = ReportJson::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

template <class T>
ReportJson list_json(const std::vector<T>& v) {
  ReportJson out = ReportJson::array();
  for (const T& x : v) out.push_back(x);
  return out;
}

ReportJson abs_list(const std::vector<cplx>& v) {
  ReportJson out = ReportJson::array();
  for (cplx z : v) out.push_back(std::abs(z));
  return out;
}

ReportJson cplx_json(cplx z) { return ReportJson::array({z.real(), z.imag()}); }

ReportJson triple_json(const TripleRecord& t) {
  return ReportJson{{"lambda", t.lambda_char},
                    {"gamma", t.gamma_char},
                    {"m", t.m},
                    {"residual", t.residual},
                    {"zero_branch", t.zero_branch}};
}

ReportJson triples_json(const std::vector<TripleRecord>& triples) {
  ReportJson out = ReportJson::array();
  for (const auto& t : triples) out.push_back(triple_json(t));
  return out;
}

ReportJson relation_json(const RelationCertificate& r) {
  return ReportJson{{"a", r.coefficients(0)},
                    {"b", r.coefficients(1)},
                    {"c", r.coefficients(2)},
                    {"d", r.coefficients(3)},
                    {"n", r.n},
                    {"m", r.m},
                    {"residual", r.operator_residual},
                    {"degenerate", r.degenerate},
                    {"window", r.window},
                    {"tau_recurrence_residual", r.tau_recurrence_residual},
                    {"beta_recurrence_residual", r.beta_recurrence_residual},
                    {"restriction_residual", r.restriction_residual}};
}

ReportJson characters_json(const JointSpectrum& spec, const std::vector<double>& labels, const char* label_key) {
  ReportJson out = ReportJson::array();
  for (size_t i = 0; i < spec.characters.size(); ++i) {
    const Character& c = spec.characters[i];
    ReportJson entry{{"values", vec_json(c.values)}, {"multiplicity", c.multiplicity}};
    if (i < labels.size()) entry[label_key] = labels[i];
    out.push_back(entry);
  }
  return out;
}

std::string scalar_text(const ReportJson& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(10);
    os << v.get<double>();
    return os.str();
  }
  return v.dump();
}

bool is_flat_array(const ReportJson& v) {
  if (!v.is_array()) return false;
  for (const auto& x : v)
    if (x.is_structured()) return false;
  return true;
}

void render(const ReportJson& v, int indent, std::ostringstream& os) {
  const std::string pad(static_cast<size_t>(indent) * 2, ' ');
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      const ReportJson& x = it.value();
      if (x.is_structured() && !is_flat_array(x) && !x.empty()) {
        os << pad << it.key() << ":\n";
        render(x, indent + 1, os);
      } else if (is_flat_array(x)) {
        os << pad << it.key() << ": [";
        for (size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << scalar_text(x[i]);
        os << "]\n";
      } else {
        os << pad << it.key() << ": " << (x.is_structured() ? x.dump() : scalar_text(x)) << "\n";
      }
    }
  } else if (v.is_array()) {
    for (size_t i = 0; i < v.size(); ++i) {
      os << pad << "[" << i << "]\n";
      render(v[i], indent + 1, os);
    }
  } else {
    os << pad << scalar_text(v) << "\n";
  }
}

}  // namespace

ReportJson config_json(const OperatorSpec& spec, const ToleranceConfig& cfg, int depth_used) {
  return ReportJson{{"family", spec.family},
                    {"N", spec.n},
                    {"params", ReportJson::parse(spec.params.dump())},
                    {"depth_requested", cfg.depth},
                    {"depth_used", depth_used},
                    {"rank_tol", cfg.rank_tol},
                    {"commutator_tol", cfg.commutator_tol},
                    {"relation_tol", cfg.relation_tol},
                    {"spectral_match_tol", cfg.spectral_match_tol},
                    {"seed", cfg.seed}};
}

ReportJson operator_json(const OperatorModel& t) {
  ReportJson out{{"family", t.family},
                 {"N", t.size()},
                 {"bandwidth", t.bandwidth},
                 {"window_step", t.window_step},
                 {"exact", t.exact},
                 {"matrix", format_matrix(t.matrix)}};
  ReportJson exceptions = ReportJson::array();
  for (const auto& [i, j] : t.rank_one_exceptions) exceptions.push_back(ReportJson::array({i, j}));
  out["rank_one_exceptions"] = exceptions;
  if (t.companion) {
    out["companion"] = format_matrix(*t.companion);
    out["window_certificate"] = t.window_certificate;
  }
  return out;
}

ReportJson commutation_json(const CommutationReport& half, const CommutationReport& full,
                            const CriterionResult& criterion) {
  ReportJson pairs = ReportJson::array();
  for (const auto& p : full.pairs)
    pairs.push_back(ReportJson{{"j", p.j}, {"k", p.k}, {"kind", p.kind}, {"residual", p.residual}});
  const char* verdict = full.centered ? "centered" : (half.half_centered ? "half_centered" : "not_half_centered");
  return ReportJson{{"half_residual", half.max_half_residual},
                    {"full_residual", full.max_full_residual},
                    {"pairs", pairs},
                    {"verdict", verdict},
                    {"half_centered", half.half_centered},
                    {"centered", full.centered},
                    {"depth", full.depth},
                    {"window", full.window},
                    {"kernel_invariance",
                     ReportJson{{"holds", criterion.holds},
                                {"vacuous", criterion.vacuous},
                                {"residual", criterion.residual},
                                {"kernel_dim", criterion.kernel_dim}}}};
}

ReportJson chain_json(const ChainDecomposition& chain, const ChainStructureReport& structure) {
  ReportJson residuals = ReportJson::object();
  for (const auto& c : structure.checks) {
    residuals[c.tag] = ReportJson{{"value", c.value},
                                  {"tolerance", c.tolerance},
                                  {"kind", c.lower_bound ? "lower_bound" : "residual"},
                                  {"pass", c.pass},
                                  {"vacuous", c.vacuous},
                                  {"per_level", list_json(c.per_level)}};
  }
  return ReportJson{{"depth", chain.depth},
                    {"window", chain.window},
                    {"injectivity_sigma", chain.injectivity_sigma},
                    {"dim_E", chain.E.dim()},
                    {"dim_M_E", chain.moduli.dim()},
                    {"closure", to_string(chain.closure_status)},
                    {"dims",
                     ReportJson{{"X", list_json(structure.dims_X)},
                                {"V", list_json(structure.dims_V)},
                                {"transit", list_json(structure.dims_transit)},
                                {"defects", list_json(structure.dims_defects)}}},
                    {"dims_decreasing", structure.dims_decreasing},
                    {"residuals", residuals},
                    {"all_pass", structure.all_pass}};
}

ReportJson spectral_json(const StructureData& s, const std::vector<TripleRecord>& triples,
                         const SpectralProperties& props) {
  return ReportJson{{"tau", vec_json(s.tau)},
                    {"beta", vec_json(s.beta)},
                    {"beta_normalized", vec_json(s.beta_normalized)},
                    {"characters", characters_json(s.characters, s.A_values, "A")},
                    {"compressed_characters", characters_json(s.compressed_characters, s.C_values, "C")},
                    {"triples", triples_json(triples)},
                    {"dim_M_E", s.moduli.dim()},
                    {"depth", s.depth},
                    {"residuals",
                     ReportJson{{"structure", s.raw_residual},
                                {"compressed", s.compressed_residual},
                                {"affine", s.affine_residual},
                                {"joint_spectrum", s.characters.max_residual}}},
                    {"properties",
                     ReportJson{{"tau_positive", props.tau_positive},
                                {"beta_zero_at_origin", props.beta_zero_at_origin},
                                {"eigenvector_implication_residual", props.nicenice_residual},
                                {"eigenvector_implication_cases", props.nicenice_cases},
                                {"zero_propagation_holds", props.colio_holds},
                                {"zero_propagation_cases", props.colio_cases},
                                {"beta_collinearity", props.beta_collinearity}}}};
}

ReportJson classification_json(const ClassificationReport& r) {
  ReportJson out{{"verdict", to_string(r.verdict)}};
  out["relation"] = r.relation ? relation_json(*r.relation) : ReportJson(nullptr);
  if (r.reconstruction) {
    const auto& rec = *r.reconstruction;
    out["reconstruction"] = ReportJson{{"n", rec.n},
                                       {"a_abs", std::abs(rec.a)},
                                       {"a", cplx_json(rec.a)},
                                       {"weights_abs", abs_list(rec.weights)},
                                       {"residual", rec.reconstruction_residual},
                                       {"joint_eigen_residual", rec.joint_eigen_residual}};
  } else {
    out["reconstruction"] = nullptr;
  }
  if (r.weighted_shift) {
    out["weighted_shift"] = ReportJson{{"weights_abs", abs_list(r.weighted_shift->weights)},
                                       {"residual", r.weighted_shift->residual}};
  }
  out["dim_M_E"] = r.dim_moduli;
  out["dim_E"] = r.dim_E;
  out["dims_V"] = list_json(r.dims_V);
  out["triples"] = triples_json(r.triples);
  out["closed_range"] = ReportJson{{"flag", r.closed_range_flag}, {"sigma", r.closed_range_sigma}};
  out["half_centered_residual"] = r.half_centered_residual;
  out["span_deficiency"] = r.span_deficiency;
  out["best_relation"] = relation_json(r.best_relation);
  out["depth"] = r.depth;
  out["window"] = r.window;
  out["diagnostics"] = list_json(r.diagnostics);
  return out;
}

std::string render_text(const ReportJson& doc) {
  std::ostringstream os;
  render(doc, 0, os);
  return os.str();
}

}  // namespace hclab
