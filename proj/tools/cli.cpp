#include "hclab/cli.hpp"

#include "hclab/errors.hpp"
#include "hclab/reports.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace hclab {

namespace {

struct RunOptions {
  std::string command;
  std::string family;
  std::string file;
  Index n = 32;
  ToleranceConfig cfg;
  std::string format = "json";
  std::string out;
  std::string weights, a, psi, xi;
  std::optional<double> q, r;
  std::optional<long long> index;
  bool n_given = false;
};

ReportJson error_json(const Error& e) {
  return ReportJson{{"kind", to_string(e.kind())},
                    {"class", static_cast<int>(failure_class(e.kind()))},
                    {"message", e.what()}};
}

OperatorSpec resolve_spec(const RunOptions& o) {
  OperatorSpec spec;
  if (!o.file.empty()) {
    spec = load_operator_spec(o.file);
    if (!o.family.empty() && o.family != spec.family)
      fail(ErrorKind::SpecParse, "--family " + o.family + " disagrees with the file's family " + spec.family);
  } else {
    if (o.family.empty()) fail(ErrorKind::SpecParse, "give --family or --file");
    nlohmann::json doc{{"family", o.family}};
    spec = parse_operator_spec(doc.dump());
    spec.n = 32;
  }
  auto& p = spec.params;
  if (!o.weights.empty()) {
    if (o.weights == "random") {
      p["weights"] = "random";
    } else {
      nlohmann::json list = nlohmann::json::array();
      for (cplx z : parse_complex_list(o.weights)) list.push_back(complex_to_json(z));
      p["weights"] = list;
      if (!o.n_given && o.file.empty()) spec.n = static_cast<Index>(list.size()) + 1;
    }
  }
  if (!o.a.empty()) p["a"] = complex_to_json(parse_complex_list(o.a).at(0));
  if (o.index) p["index"] = *o.index;
  if (o.q) p["q"] = *o.q;
  if (o.r) p["r"] = *o.r;
  if (!o.psi.empty()) p["psi"] = o.psi;
  if (!o.xi.empty()) p["xi"] = o.xi;
  if (o.n_given) spec.n = o.n;
  return spec;
}

// Largest depth <= requested whose commutator window window(2K) keeps at least
// 8 indices (any nonempty window for exact models).
int check_depth(const OperatorModel& t, int requested) {
  const Index floor = t.exact ? 1 : 8;
  int k = requested;
  while (k > 1 && t.window(2 * k) < floor) --k;
  return k;
}

// Certificates attached to a verdict must sit within their tolerances.
bool certificates_clean(const ClassificationReport& r, const ToleranceConfig& cfg) {
  if (r.relation) {
    const auto& c = *r.relation;
    if (c.operator_residual > cfg.relation_tol || c.tau_recurrence_residual > cfg.relation_tol ||
        c.beta_recurrence_residual > cfg.relation_tol)
      return false;
  }
  if (r.reconstruction && r.reconstruction->reconstruction_residual > cfg.relation_tol) return false;
  if (r.weighted_shift && r.weighted_shift->residual > cfg.relation_tol) return false;
  return true;
}

struct CommandOutput {
  ReportJson report;
  int depth_used = 0;
  int exit_code = 0;
};

CommandOutput run_command(const std::string& command, const OperatorModel& t, const ToleranceConfig& cfg) {
  CommandOutput out;
  if (command == "zoo") {
    out.report = operator_json(t);
    out.depth_used = cfg.depth;
    return out;
  }
  if (command == "check") {
    ToleranceConfig c = cfg;
    c.depth = check_depth(t, cfg.depth);
    out.depth_used = c.depth;
    const CommutationReport half = half_centered_check(t, c);
    const CommutationReport full = centered_check(t, c);
    out.report = commutation_json(half, full, centered_criterion(t, c));
    return out;
  }
  if (command == "decompose") {
    const ChainDecomposition chain = chain_decomposition(t, cfg);
    const ChainStructureReport rep = verify_chain_structure(t, chain, isometry_tower(t, chain, cfg), cfg);
    out.depth_used = chain.depth;
    out.report = chain_json(chain, rep);
    out.exit_code = rep.all_pass ? 0 : static_cast<int>(FailureClass::Numerical);
    return out;
  }
  if (command == "spectral") {
    const ChainDecomposition chain = chain_decomposition(t, cfg);
    const StructureData s = structure_extract(t, chain, cfg);
    const auto triples = enumerate_triples(s, cfg);
    out.depth_used = s.depth;
    out.report = spectral_json(s, triples, spectral_properties(s, triples, cfg));
    return out;
  }
  if (command == "classify") {
    const ClassificationReport r = classify(t, cfg);
    out.depth_used = r.depth;
    out.report = classification_json(r);
    if (r.verdict == Verdict::Inconclusive)
      out.exit_code = static_cast<int>(FailureClass::Inconclusive);
    else if (!certificates_clean(r, cfg))
      out.exit_code = static_cast<int>(FailureClass::Numerical);
    return out;
  }
  // verify: commutation, chain structure, correspondence, spectral properties.
  ToleranceConfig c = cfg;
  c.depth = check_depth(t, cfg.depth);
  const CommutationReport half = half_centered_check(t, c);
  const CommutationReport full = centered_check(t, c);
  const ChainDecomposition chain = chain_decomposition(t, cfg);
  const ChainStructureReport rep = verify_chain_structure(t, chain, isometry_tower(t, chain, cfg), cfg);
  const CorrespondenceReport corr = spectral_correspondence_check(t, chain, cfg);
  out.depth_used = chain.depth;
  out.report = ReportJson{{"commutation", commutation_json(half, full, centered_criterion(t, c))},
                          {"chain", chain_json(chain, rep)}};
  ReportJson levels = ReportJson::array();
  for (int l : corr.noncommuting_levels) levels.push_back(l);
  out.report["correspondence"] = ReportJson{{"worst_residual", corr.worst_residual},
                                            {"entries", corr.entries.size()},
                                            {"noncommuting_levels", levels}};
  bool ok = half.half_centered && rep.all_pass && corr.worst_residual <= cfg.spectral_match_tol;
  if (chain.moduli.dim() >= 2) {
    const StructureData s = structure_extract(t, chain, cfg);
    const auto triples = enumerate_triples(s, cfg);
    const SpectralProperties props = spectral_properties(s, triples, cfg);
    out.report["spectral"] = spectral_json(s, triples, props);
    ok = ok && props.tau_positive && props.beta_zero_at_origin && props.colio_holds &&
         props.nicenice_residual <= cfg.spectral_match_tol;
  }
  out.report["all_pass"] = ok;
  out.exit_code = ok ? 0 : static_cast<int>(FailureClass::Numerical);
  return out;
}

std::string zoo_text(const OperatorModel& t) {
  std::ostringstream os;
  os << "# family " << t.family << "\n";
  os << "# bandwidth " << t.bandwidth << " window_step " << t.window_step << " exact " << (t.exact ? 1 : 0) << "\n";
  os << format_matrix(t.matrix);
  if (t.companion) os << "# companion\n" << format_matrix(*t.companion);
  return os.str();
}

void write_atomically(const std::string& path, const std::string& body) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::SpecParse, "cannot write '" + tmp.string() + "'");
    f << body;
    if (!f) fail(ErrorKind::SpecParse, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) fail(ErrorKind::SpecParse, "cannot move output into place: " + ec.message());
}

void add_common(CLI::App* sub, RunOptions& o) {
  sub->add_option("--family", o.family, "operator family");
  sub->add_option("--file", o.file, "JSON operator spec")->check(CLI::ExistingFile);
  sub->add_option("--n", o.n, "matrix size N")->check(CLI::PositiveNumber);
  sub->add_option("--depth", o.cfg.depth, "gram power depth K")->check(CLI::PositiveNumber);
  sub->add_option("--tol-rank", o.cfg.rank_tol, "rank tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--tol-comm", o.cfg.commutator_tol, "commutator tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--tol-rel", o.cfg.relation_tol, "relation tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.cfg.seed, "seed for random weights (HCLAB_SEED overrides)");
  sub->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  sub->add_option("--out", o.out, "output path");
  sub->add_option("--weights", o.weights, "comma-separated complex weights, or 'random'");
  sub->add_option("--a", o.a, "complex parameter a");
  sub->add_option("--index", o.index, "column carrying the rank-one term");
  sub->add_option("--q", o.q, "aq parameter q");
  sub->add_option("--r", o.r, "aq shift r");
  sub->add_option("--psi", o.psi, "composition symbol, comma-separated indices");
  sub->add_option("--xi", o.xi, "composition multipliers, comma-separated complex");
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& args) {
  CliResult result;
  RunOptions o;
  CLI::App app{"Half-centered operator laboratory", "hclab"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"zoo", "build an operator and dump its matrix"},
      {"check", "half-centered and centered commutation checks"},
      {"decompose", "chain decomposition with structural checks"},
      {"spectral", "tau/beta, joint characters and triples"},
      {"classify", "classification verdict with certificates"},
      {"verify", "full structural suite"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    subs.push_back(sub);
  }

  std::ostringstream out, err;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    result.out = out.str();
    result.err = err.str();
    result.exit_code = code == 0 ? 0 : static_cast<int>(FailureClass::Parse);
    return result;
  }
  for (CLI::App* sub : subs)
    if (sub->parsed()) {
      o.command = sub->get_name();
      o.n_given = sub->count("--n") > 0;
    }
  if (const char* env = std::getenv("HCLAB_SEED")) {
    try {
      o.cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      result.err = "HCLAB_SEED is not an unsigned integer\n";
      result.exit_code = static_cast<int>(FailureClass::Parse);
      return result;
    }
  }

  OperatorSpec spec;
  ReportJson doc;
  std::optional<OperatorModel> model;
  try {
    o.cfg.validate();
    spec = resolve_spec(o);
    model = build_operator(spec, o.cfg);
    if (spec.n == 0) spec.n = model->size();
    const CommandOutput res = run_command(o.command, *model, o.cfg);
    doc = ReportJson{{"command", o.command}, {"config", config_json(spec, o.cfg, res.depth_used)}};
    for (auto it = res.report.begin(); it != res.report.end(); ++it) doc[it.key()] = it.value();
    result.exit_code = res.exit_code;
  } catch (const Error& e) {
    doc = ReportJson{{"command", o.command}, {"config", config_json(spec, o.cfg, o.cfg.depth)}, {"error", error_json(e)}};
    err << e.what() << "\n";
    result.exit_code = static_cast<int>(failure_class(e.kind()));
  }

  std::string body;
  if (o.format == "text")
    body = (o.command == "zoo" && model && result.exit_code == 0) ? zoo_text(*model) : render_text(doc);
  else
    body = doc.dump(2) + "\n";

  if (o.out.empty()) {
    result.out = body;
  } else {
    try {
      write_atomically(o.out, body);
    } catch (const Error& e) {
      err << e.what() << "\n";
      if (result.exit_code == 0) result.exit_code = static_cast<int>(FailureClass::Parse);
    }
  }
  result.err = err.str();
  return result;
}

}  // namespace hclab
