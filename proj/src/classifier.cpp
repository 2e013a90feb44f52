#include "hclab/classifier.hpp"

#include "hclab/commutation_lab.hpp"
#include "hclab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace hclab {

namespace {

// Real coordinates of a Hermitian block in which the Frobenius norm is the
// Euclidean norm: diagonal, then sqrt(2) Re and sqrt(2) Im above it.
RVector hermitian_coordinates(const CMatrix& block) {
  const Index w = block.rows();
  RVector out(w * w);
  Index pos = 0;
  for (Index i = 0; i < w; ++i) out(pos++) = block(i, i).real();
  const double r2 = std::sqrt(2.0);
  for (Index i = 0; i < w; ++i)
    for (Index j = i + 1; j < w; ++j) {
      const cplx z = (block(i, j) + std::conj(block(j, i))) * 0.5;
      out(pos++) = r2 * z.real();
      out(pos++) = r2 * z.imag();
    }
  return out;
}

void fix_sign(RVector& c) {
  const double top = c.cwiseAbs().maxCoeff();
  for (Index i = 0; i < c.size(); ++i)
    if (std::abs(c(i)) > 1e-8 * top) {
      if (c(i) < 0.0) c = -c;
      return;
    }
}

RelationCertificate evaluate_pair(const std::vector<CMatrix>& grams, int n, int m, Index w,
                                  const ToleranceConfig& cfg) {
  RelationCertificate cert;
  cert.n = n;
  cert.m = m;
  cert.degenerate = n == m;
  cert.window = w;
  std::vector<const CMatrix*> members{&grams[0], &grams[static_cast<size_t>(n)]};
  if (!cert.degenerate) members.push_back(&grams[static_cast<size_t>(m)]);
  members.push_back(&grams[static_cast<size_t>(n + m)]);
  const Index p = static_cast<Index>(members.size());

  std::vector<CMatrix> blocks;
  RMatrix stack(w * w, p);
  RVector col_norm(p);
  for (Index i = 0; i < p; ++i) {
    blocks.push_back(members[static_cast<size_t>(i)]->topLeftCorner(w, w));
    stack.col(i) = hermitian_coordinates(blocks.back());
    col_norm(i) = stack.col(i).norm();
    if (col_norm(i) == 0.0) col_norm(i) = 1.0;
    stack.col(i) /= col_norm(i);
  }
  Eigen::JacobiSVD<RMatrix> svd(stack, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  Index null_dim = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= cfg.relation_tol * sv(0)) ++null_dim;
  null_dim = std::max<Index>(null_dim, 1);
  if (stack.rows() < p) null_dim = std::max<Index>(null_dim, p - stack.rows());

  RMatrix basis = col_norm.cwiseInverse().asDiagonal() * svd.matrixV().rightCols(null_dim);
  RVector coef;
  if (null_dim == 1) {
    coef = basis.col(0);
  } else {
    // Several independent relations: take the one with the largest signed
    // product of the constant and top-degree coefficients.
    RMatrix form = RMatrix::Zero(p, p);
    form(0, p - 1) = form(p - 1, 0) = 0.5;
    const RMatrix lhs = basis.transpose() * form * basis;
    const RMatrix rhs = basis.transpose() * basis;
    Eigen::GeneralizedSelfAdjointEigenSolver<RMatrix> ges(lhs, rhs);
    coef = basis * ges.eigenvectors().col(null_dim - 1);
  }
  coef.normalize();
  fix_sign(coef);

  CMatrix sum = CMatrix::Zero(w, w);
  double largest = 0.0;
  for (Index i = 0; i < p; ++i) {
    sum += coef(i) * blocks[static_cast<size_t>(i)];
    largest = std::max(largest, std::abs(coef(i)) * blocks[static_cast<size_t>(i)].norm());
  }
  cert.operator_residual = largest > 0.0 ? sum.norm() / largest : 0.0;
  if (cert.degenerate)
    cert.coefficients << coef(0), coef(1), 0.0, coef(2);
  else
    cert.coefficients = coef;
  cert.accepted = cert.operator_residual <= cfg.relation_tol;
  return cert;
}

void phase_fix(CVector& v) {
  Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  const cplx z = v(idx);
  if (std::abs(z) > 0.0) v *= std::conj(z) / std::abs(z);
}

// ||T X[:, :L-1] - X B[:, :L-1]||_F / ||T X[:, :L-1]||_F.
double pattern_residual(const CMatrix& t, const CMatrix& x, const CMatrix& b) {
  const Index l = x.cols();
  if (l < 2) return 0.0;
  const CMatrix tx = t * x.leftCols(l - 1);
  const double den = tx.norm();
  const CMatrix diff = tx - x * b.leftCols(l - 1);
  return den > 0.0 ? diff.norm() / den : diff.norm();
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<double> poly_sub(std::vector<double> a, const std::vector<double>& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  return a;
}

double max_abs(const std::vector<double>& p) {
  double out = 0.0;
  for (double v : p) out = std::max(out, std::abs(v));
  return out;
}

// The pair (1 - z^m / scale, C - A z^m / scale) for one triple.
std::pair<std::vector<double>, std::vector<double>> triple_polynomials(const TripleRecord& t,
                                                                       const StructureData& s) {
  const double lm = s.characters.characters.at(static_cast<size_t>(t.lambda_char)).values(t.m);
  const double c = s.C_values.at(static_cast<size_t>(t.gamma_char));
  const double a = s.A_values.at(static_cast<size_t>(t.lambda_char));
  std::vector<double> first(static_cast<size_t>(t.m) + 1, 0.0), second(static_cast<size_t>(t.m) + 1, 0.0);
  first[0] = 1.0;
  second[0] = c;
  if (t.zero_branch) {
    first[static_cast<size_t>(t.m)] = -1.0 / s.tau(t.m);
  } else {
    first[static_cast<size_t>(t.m)] = -1.0 / lm;
    second[static_cast<size_t>(t.m)] = -a / lm;
  }
  return {first, second};
}

}  // namespace

double recurrence_residual(const RelationCertificate& cert, const RVector& seq) {
  const int offs[4] = {0, cert.n, cert.m, cert.n + cert.m};
  double worst = 0.0;
  for (int k = 0; k + cert.n + cert.m < seq.size(); ++k) {
    double sum = 0.0, largest = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double term = cert.coefficients(i) * seq(k + offs[i]);
      sum += term;
      largest = std::max(largest, std::abs(term));
    }
    if (largest > 0.0) worst = std::max(worst, std::abs(sum) / largest);
  }
  return worst;
}

RelationSearch relation_search(const OperatorModel& t, const ToleranceConfig& cfg) {
  const int depth = t.effective_depth(cfg.depth);
  if (depth < 2) fail(ErrorKind::WindowExhausted, "relation search needs depth >= 2");
  const std::vector<CMatrix> grams = gram_powers(t, depth);
  RelationSearch out;
  out.best.operator_residual = 1e300;
  for (int total = 2; total <= depth; ++total)
    for (int n = 1; 2 * n <= total; ++n) {
      const Index w = t.window(total);
      if (w < 1) continue;
      RelationCertificate cert = evaluate_pair(grams, n, total - n, w, cfg);
      if (cert.operator_residual < out.best.operator_residual) out.best = cert;
      out.scanned.push_back(cert);
      if (cert.accepted && !out.accepted) out.accepted = cert;
    }
  return out;
}

RelationCertificate relation_detect(const OperatorModel& t, const ToleranceConfig& cfg) {
  RelationSearch search = relation_search(t, cfg);
  if (!search.accepted)
    fail(ErrorKind::NoRelationFound, "best residual " + std::to_string(search.best.operator_residual) +
                                         " at (n, m) = (" + std::to_string(search.best.n) + ", " +
                                         std::to_string(search.best.m) + ")");
  return *search.accepted;
}

double annihilation_residual(const std::vector<double>& p, const RVector& seq) {
  const Index deg = static_cast<Index>(p.size()) - 1;
  double worst = 0.0;
  for (Index k = 0; k + deg < seq.size(); ++k) {
    double sum = 0.0, largest = 0.0;
    for (Index j = 0; j <= deg; ++j) {
      const double term = p[static_cast<size_t>(j)] * seq(k + j);
      sum += term;
      largest = std::max(largest, std::abs(term));
    }
    if (largest > 0.0) worst = std::max(worst, std::abs(sum) / largest);
  }
  return worst;
}

PolynomialSet polynomial_machinery(const TripleRecord& first, const TripleRecord& second, const StructureData& s,
                                   const ToleranceConfig& cfg) {
  PolynomialSet out;
  std::tie(out.P1, out.P2) = triple_polynomials(first, s);
  std::tie(out.Q1, out.Q2) = triple_polynomials(second, s);
  out.P = poly_sub(poly_mul(out.P1, out.Q2), poly_mul(out.P2, out.Q1));
  while (out.P.size() > 1 && out.P.back() == 0.0) out.P.pop_back();
  const double scale = std::max({1.0, max_abs(out.P1) * max_abs(out.Q2), max_abs(out.P2) * max_abs(out.Q1)});
  out.identically_zero = max_abs(out.P) <= cfg.spectral_match_tol * scale;
  out.constant_term = out.P.front();
  if (out.identically_zero) fail(ErrorKind::DegenerateTriples, "P vanishes for the chosen pair of triples");
  out.tau_residual = annihilation_residual(out.P, s.tau);
  out.beta_residual = annihilation_residual(out.P, s.beta);
  return out;
}

ShiftRankOneCertificate shift_rank_one_reconstruct(const OperatorModel& t, const StructureData& s,
                                                   const std::vector<TripleRecord>& triples,
                                                   const ToleranceConfig& cfg) {
  if (triples.size() != 1)
    fail(ErrorKind::NotSingleTriple, "expected one triple, found " + std::to_string(triples.size()));
  const auto& chars = s.characters.characters;
  if (s.moduli.dim() != 2 || chars.size() != 2)
    fail(ErrorKind::NotSingleTriple, "reconstruction needs two simple characters on a 2-dimensional moduli space");
  const TripleRecord& tr = triples.front();
  const int m = tr.m;
  const CMatrix& tm = t.matrix;
  const Index L = t.window(s.depth);
  if (L <= m) fail(ErrorKind::WindowExhausted, "window shorter than the rank-one column");

  CMatrix x(t.size(), L);
  CVector w = s.moduli.frame * chars[static_cast<size_t>(tr.lambda_char)].frame.frame.col(0);
  CVector v = s.moduli.frame * chars[static_cast<size_t>(1 - tr.lambda_char)].frame.frame.col(0);
  phase_fix(w);
  x.col(0) = w / w.norm();
  for (Index k = 1; k < L; ++k) {
    CVector next = tm * x.col(k - 1);
    if (k == m) {
      const cplx overlap = v.dot(next);
      if (std::abs(overlap) > cfg.rank_tol)
        next = v * (overlap / std::abs(overlap));
      else {
        next = v;
        phase_fix(next);
      }
    }
    const double norm = next.norm();
    if (norm == 0.0) fail(ErrorKind::PatternResidualTooLarge, "basis vector vanished");
    x.col(k) = next / norm;
  }

  ShiftRankOneCertificate cert;
  cert.n = m - 1;
  CMatrix b = CMatrix::Zero(L, L);
  for (Index k = 0; k + 1 < L; ++k) {
    const cplx wk = x.col(k + 1).dot(tm * x.col(k));
    cert.weights.push_back(wk);
    b(k + 1, k) = wk;
  }
  cert.a = x.col(0).dot(tm * x.col(cert.n));
  b(0, cert.n) += cert.a;
  cert.reconstruction_residual = pattern_residual(tm, x, b);
  cert.orthonormality_residual = (x.adjoint() * x - CMatrix::Identity(L, L)).norm();

  // Joint eigenvector test on the basis vectors that stay inside the window.
  const std::vector<CMatrix> grams = gram_powers(t, s.depth);
  for (Index k = 0; k < L; ++k) {
    if (x.col(k).tail(t.size() - L).norm() > cfg.relation_tol) continue;
    for (int j = 1; j <= s.depth; ++j) {
      const CVector img = grams[static_cast<size_t>(j)] * x.col(k);
      const cplx value = x.col(k).dot(img);
      const double scale = op_norm(grams[static_cast<size_t>(j)].topLeftCorner(L, L));
      cert.joint_eigen_residual =
          std::max(cert.joint_eigen_residual, (img - value * x.col(k)).norm() / scale);
    }
  }
  cert.basis = std::move(x);
  if (!(cert.reconstruction_residual <= cfg.relation_tol))
    fail(ErrorKind::PatternResidualTooLarge,
         "shift-plus-rank-one pattern residual " + std::to_string(cert.reconstruction_residual));
  return cert;
}

WeightedShiftCertificate weighted_shift_certificate(const OperatorModel& t, const ChainDecomposition& chain,
                                                    const ToleranceConfig& cfg) {
  (void)cfg;
  const Index L = chain.window;
  CMatrix x(t.size(), L);
  CVector e = chain.E.frame.col(0);
  phase_fix(e);
  x.col(0) = e;
  for (Index k = 1; k < L; ++k) {
    const CVector next = t.matrix * x.col(k - 1);
    x.col(k) = next / next.norm();
  }
  WeightedShiftCertificate cert;
  CMatrix b = CMatrix::Zero(L, L);
  for (Index k = 0; k + 1 < L; ++k) {
    const cplx wk = x.col(k + 1).dot(t.matrix * x.col(k));
    cert.weights.push_back(wk);
    b(k + 1, k) = wk;
  }
  cert.residual = pattern_residual(t.matrix, x, b);
  cert.basis = std::move(x);
  return cert;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::CenteredWeightedShift: return "centered_weighted_shift";
    case Verdict::ShiftPlusRankOne: return "shift_plus_rank_one";
    case Verdict::FourTermRelation: return "four_term_relation";
    case Verdict::Both: return "both";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double chain_span_deficiency(const OperatorModel& t, const Subspace& moduli, Index w, double rank_tol) {
  const Index n = t.size();
  auto deficiency = [&](const Subspace& x) {
    const CMatrix lead = CMatrix::Identity(n, w);
    return op_norm(lead - x.frame * (x.frame.adjoint() * lead));
  };
  Subspace x = moduli;
  Subspace layer = moduli;
  double current = deficiency(x);
  int idle = 0;
  for (Index step = 0; step < n && current > rank_tol && idle < 2; ++step) {
    layer = range_of(t.matrix * layer.frame, rank_tol);
    if (layer.dim() == 0) break;
    Subspace grown = subspace_sum(x, layer);
    idle = grown.dim() == x.dim() ? idle + 1 : 0;
    x = std::move(grown);
    current = deficiency(x);
  }
  return current;
}

ClassificationReport classify(const OperatorModel& t, const ToleranceConfig& cfg) {
  cfg.validate();
  ClassificationReport rep;
  ToleranceConfig used = cfg;
  used.depth = analysis_depth(t, cfg);
  while (used.depth > 1 && t.window(2 * used.depth) < 1) --used.depth;
  rep.depth = used.depth;
  rep.window = t.window(used.depth);

  const CommutationReport half = half_centered_check(t, used);
  rep.half_centered_residual = half.max_half_residual;
  if (!half.half_centered)
    fail(ErrorKind::PreconditionViolated,
         "not half-centered: commutator residual " + std::to_string(half.max_half_residual));
  const Subspace e = kernel_of_adjoint(t, used);
  rep.dim_E = e.dim();
  if (e.dim() != 1) fail(ErrorKind::PreconditionViolated, "dim ker T* = " + std::to_string(e.dim()) + ", need 1");

  const ChainDecomposition chain = chain_decomposition(t, used);
  rep.dim_moduli = chain.moduli.dim();
  rep.dims_V = chain.dims(chain.V);
  rep.span_deficiency = chain_span_deficiency(t, chain.moduli, rep.window, used.rank_tol);
  if (rep.span_deficiency > used.relation_tol)
    rep.diagnostics.push_back("chain leaves part of the window block uncovered (deficiency " +
                              std::to_string(rep.span_deficiency) + ")");

  const CMatrix t1 = chain.grams[1].topLeftCorner(rep.window, rep.window);
  const double t1_norm = op_norm(chain.grams[1]);
  rep.closed_range_sigma = t1_norm > 0.0 ? hermitian_eig(t1, 1e-6).values(0) / t1_norm : 0.0;
  rep.closed_range_flag = rep.closed_range_sigma > used.relation_tol;

  if (rep.dim_moduli == 1) {
    rep.weighted_shift = weighted_shift_certificate(t, chain, used);
    if (rep.weighted_shift->residual <= used.relation_tol) {
      rep.verdict = Verdict::CenteredWeightedShift;
    } else {
      rep.diagnostics.push_back("dim M_E = 1 but the weighted-shift pattern residual is " +
                                std::to_string(rep.weighted_shift->residual));
    }
    return rep;
  }

  rep.structure = structure_extract(t, chain, used);
  const StructureData& s = *rep.structure;
  rep.triples = enumerate_triples(s, used);

  const RelationSearch search = relation_search(t, used);
  rep.best_relation = search.best;
  if (search.accepted) {
    RelationCertificate cert = *search.accepted;
    cert.tau_recurrence_residual = recurrence_residual(cert, s.tau);
    cert.beta_recurrence_residual = recurrence_residual(cert, s.beta);
    // Evaluated on the block where the truncated gram powers are exact.
    const int idx[4] = {0, cert.n, cert.m, cert.n + cert.m};
    const Index w = cert.window;
    for (const Subspace& v : chain.V) {
      if (v.dim() == 0) continue;
      const CMatrix lead = v.frame.topRows(w);
      CMatrix sum = CMatrix::Zero(w, v.dim());
      double largest = 0.0;
      for (int i = 0; i < 4; ++i) {
        const CMatrix term =
            cert.coefficients(i) * (chain.grams[static_cast<size_t>(idx[i])].topLeftCorner(w, w) * lead);
        sum += term;
        largest = std::max(largest, term.norm());
      }
      if (largest > 0.0) cert.restriction_residual = std::max(cert.restriction_residual, sum.norm() / largest);
    }
    if (cert.tau_recurrence_residual > used.relation_tol || cert.beta_recurrence_residual > used.relation_tol)
      rep.diagnostics.push_back("relation accepted on the window but the tau/beta recurrences miss it");
    else
      rep.relation = cert;
  }

  if (rep.triples.empty()) {
    rep.diagnostics.push_back("no triple found at spectral_match_tol");
    return rep;
  }

  if (rep.triples.size() == 1) {
    try {
      rep.reconstruction = shift_rank_one_reconstruct(t, s, rep.triples, used);
    } catch (const Error& err) {
      rep.diagnostics.push_back(std::string("reconstruction failed: ") + err.what());
      return rep;
    }
    rep.verdict = rep.relation ? Verdict::Both : Verdict::ShiftPlusRankOne;
    return rep;
  }

  if (!rep.relation) {
    rep.diagnostics.push_back(std::to_string(rep.triples.size()) +
                              " triples but no accepted four-term relation");
    return rep;
  }
  if (rep.dim_moduli >= 3) {
    if (!(std::abs(rep.relation->coefficients(0)) > used.relation_tol)) {
      rep.diagnostics.push_back("dim M_E >= 3 but the relation has a = 0");
      return rep;
    }
    if (!rep.closed_range_flag) {
      rep.diagnostics.push_back("dim M_E >= 3 but T_1 is not bounded below on the window");
      return rep;
    }
  }
  rep.verdict = Verdict::FourTermRelation;
  return rep;
}

}  // namespace hclab
