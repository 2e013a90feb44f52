#include "hclab/spectral_lab.hpp"

#include "hclab/errors.hpp"
#include "hclab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hclab {

namespace {

CMatrix symmetrized(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

// Splits the columns of `frame` into eigen-clusters of frame* h frame.
std::vector<CMatrix> split_block(const CMatrix& frame, const CMatrix& h, double cluster_tol) {
  const CMatrix local = symmetrized(frame.adjoint() * h * frame);
  EigResult eig = hermitian_eig(local, 1e-6);
  std::vector<CMatrix> out;
  Index start = 0;
  const Index b = eig.values.size();
  for (Index i = 1; i <= b; ++i) {
    if (i == b || eig.values(i) - eig.values(i - 1) > cluster_tol) {
      out.push_back(frame * eig.vectors.middleCols(start, i - start));
      start = i;
    }
  }
  return out;
}

double family_scale(const CMatrix& m) {
  const double s = op_norm(m);
  return s > 0.0 ? s : 1.0;
}

}  // namespace

RVector with_identity(const RVector& values) {
  RVector out(values.size() + 1);
  out(0) = 1.0;
  out.tail(values.size()) = values;
  return out;
}

JointSpectrum joint_diagonalize(const std::vector<CMatrix>& family, const ToleranceConfig& cfg) {
  if (family.empty()) fail(ErrorKind::EmptyInput, "joint_diagonalize needs at least one matrix");
  const Index d = family.front().rows();
  for (const auto& m : family)
    if (m.rows() != d || m.cols() != d) fail(ErrorKind::DimensionMismatch, "family sizes differ");
  JointSpectrum out;
  if (d == 0) return out;

  std::vector<double> scale;
  for (const auto& m : family) scale.push_back(family_scale(m));
  for (size_t i = 0; i < family.size(); ++i)
    for (size_t j = i + 1; j < family.size(); ++j) {
      const double r = (family[i] * family[j] - family[j] * family[i]).norm() / (scale[i] * scale[j]);
      if (r > cfg.commutator_tol)
        fail(ErrorKind::NotCommuting, "members " + std::to_string(i) + " and " + std::to_string(j) +
                                          " have scaled commutator " + std::to_string(r));
    }

  SeededRng rng(cfg.seed);
  CMatrix mix = CMatrix::Zero(d, d);
  double weight_sum = 0.0;
  for (size_t i = 0; i < family.size(); ++i) {
    const double c = rng.uniform(1.0, 2.0);
    weight_sum += c;
    mix += c * symmetrized(family[i]) / scale[i];
  }
  std::vector<CMatrix> blocks =
      split_block(CMatrix::Identity(d, d), mix, cfg.spectral_match_tol * weight_sum);
  for (size_t i = 0; i < family.size(); ++i) {
    std::vector<CMatrix> refined;
    for (const CMatrix& f : blocks) {
      if (f.cols() == 1) {
        refined.push_back(f);
        continue;
      }
      for (CMatrix& g : split_block(f, family[i], cfg.spectral_match_tol * scale[i])) refined.push_back(std::move(g));
    }
    blocks = std::move(refined);
  }

  struct Raw {
    RVector values;
    CMatrix frame;
  };
  std::vector<Raw> raw;
  for (const CMatrix& f : blocks) {
    RVector v(static_cast<Index>(family.size()));
    for (size_t i = 0; i < family.size(); ++i)
      v(static_cast<Index>(i)) = (f.adjoint() * family[i] * f).trace().real() / static_cast<double>(f.cols());
    raw.push_back({v, f});
  }

  // Merge near-degenerate characters.
  std::vector<Raw> merged;
  for (Raw& r : raw) {
    bool placed = false;
    for (Raw& m : merged) {
      bool close = true;
      for (size_t i = 0; i < family.size() && close; ++i)
        close = std::abs(m.values(static_cast<Index>(i)) - r.values(static_cast<Index>(i))) <=
                cfg.spectral_match_tol * scale[i];
      if (!close) continue;
      const double wa = static_cast<double>(m.frame.cols());
      const double wb = static_cast<double>(r.frame.cols());
      m.values = (m.values * wa + r.values * wb) / (wa + wb);
      CMatrix both(d, m.frame.cols() + r.frame.cols());
      both << m.frame, r.frame;
      m.frame = both;
      placed = true;
      break;
    }
    if (!placed) merged.push_back(std::move(r));
  }

  std::sort(merged.begin(), merged.end(), [](const Raw& a, const Raw& b) {
    for (Index i = 0; i < a.values.size(); ++i)
      if (a.values(i) != b.values(i)) return a.values(i) < b.values(i);
    return false;
  });

  for (Raw& m : merged) {
    for (size_t i = 0; i < family.size(); ++i) {
      const CMatrix resid = family[i] * m.frame - m.frame * m.values(static_cast<Index>(i));
      out.max_residual = std::max(out.max_residual, op_norm(resid) / scale[i]);
    }
    Character c;
    c.values = m.values;
    c.multiplicity = m.frame.cols();
    c.frame = Subspace{m.frame, cfg.rank_tol};
    out.characters.push_back(std::move(c));
  }
  return out;
}

namespace {

std::vector<CMatrix> tail_family(const std::vector<CMatrix>& with_zero) {
  return std::vector<CMatrix>(with_zero.begin() + 1, with_zero.end());
}

JointSpectrum spectrum_with_identity(const std::vector<CMatrix>& family_from_zero, const ToleranceConfig& cfg) {
  JointSpectrum js = joint_diagonalize(tail_family(family_from_zero), cfg);
  for (Character& c : js.characters) c.values = with_identity(c.values);
  return js;
}

double ls_coefficient(const RVector& values, const RVector& tau, const RVector& beta) {
  const double den = beta.squaredNorm();
  if (den == 0.0) return 0.0;
  return (values - tau).dot(beta) / den;
}

}  // namespace

double relative_gap(double x, double y) {
  const double s = std::max(std::abs(x), std::abs(y));
  if (s == 0.0) return 0.0;
  return std::abs(x - y) / s;
}

RVector beta_from_pair(const StructureData& s, int lambda_index, int mu_index) {
  return s.characters.characters.at(static_cast<size_t>(lambda_index)).values -
         s.characters.characters.at(static_cast<size_t>(mu_index)).values;
}

StructureData structure_extract(const OperatorModel& t, const ChainDecomposition& chain,
                                const ToleranceConfig& cfg) {
  (void)t;
  if (chain.E.dim() != 1)
    fail(ErrorKind::PreconditionViolated, "structure extraction needs dim E = 1, got " +
                                              std::to_string(chain.E.dim()));
  const Index d = chain.moduli.dim();
  if (d < 2) fail(ErrorKind::ModuliTooSmall, "dim moduli = " + std::to_string(d) + " < 2");
  const int depth = chain.depth;

  StructureData s;
  s.depth = depth;
  s.moduli = chain.moduli;
  const CMatrix& f = chain.moduli.frame;
  s.e = f.adjoint() * chain.E.frame.col(0);
  s.e.normalize();
  s.complement = kernel_of(s.e.adjoint(), cfg.rank_tol).frame;
  for (int k = 0; k <= depth; ++k) {
    s.family.push_back(symmetrized(f.adjoint() * chain.grams[k] * f));
    s.compressed.push_back(symmetrized(s.complement.adjoint() * s.family.back() * s.complement));
  }
  s.tau.resize(depth + 1);
  for (int k = 0; k <= depth; ++k) s.tau(k) = s.e.dot(s.family[k] * s.e).real();

  s.characters = spectrum_with_identity(s.family, cfg);
  s.compressed_characters = spectrum_with_identity(s.compressed, cfg);
  const auto& chars = s.characters.characters;

  s.beta = RVector::Zero(depth + 1);
  s.beta_normalized = RVector::Zero(depth + 1);
  s.A = CMatrix::Zero(d, d);
  s.C = CMatrix::Zero(d - 1, d - 1);
  double value_scale = 1.0;
  for (int k = 1; k <= depth; ++k) value_scale = std::max(value_scale, family_scale(s.family[k]));

  if (chars.size() >= 2) {
    // Provisional β from the most separated pair, then the extreme A-coordinates.
    size_t pi = 0, pj = 1;
    double best = -1.0;
    for (size_t i = 0; i < chars.size(); ++i)
      for (size_t j = i + 1; j < chars.size(); ++j) {
        const double gap = (chars[i].values - chars[j].values).cwiseAbs().maxCoeff();
        if (gap > best) {
          best = gap;
          pi = i;
          pj = j;
        }
      }
    const RVector provisional = chars[pi].values - chars[pj].values;
    std::vector<double> coord;
    for (const Character& c : chars) coord.push_back(ls_coefficient(c.values, s.tau, provisional));
    s.lambda_index = static_cast<int>(std::max_element(coord.begin(), coord.end()) - coord.begin());
    s.mu_index = static_cast<int>(std::min_element(coord.begin(), coord.end()) - coord.begin());
    s.beta = chars[static_cast<size_t>(s.lambda_index)].values - chars[static_cast<size_t>(s.mu_index)].values;
  }
  const double beta_max = s.beta.cwiseAbs().maxCoeff();
  s.nonzero_beta = beta_max > cfg.spectral_match_tol * value_scale;

  if (s.nonzero_beta) {
    for (int k = 1; k <= depth; ++k)
      if (std::abs(s.beta(k)) > cfg.spectral_match_tol * beta_max) {
        s.a_source_k = k;
        break;
      }
    s.beta_scale = s.beta(s.a_source_k);
    s.beta_normalized = s.beta / s.beta_scale;
    s.beta_normalized(0) = 0.0;
    const int k0 = s.a_source_k;
    s.A = symmetrized((s.family[k0] - s.tau(k0) * CMatrix::Identity(d, d)) / s.beta(k0));
    s.C = symmetrized(s.complement.adjoint() * s.A * s.complement);
  }

  const CMatrix p = CMatrix::Identity(d, d) - s.e * s.e.adjoint();
  for (int k = 0; k <= depth; ++k) {
    const double scale = family_scale(s.family[k]);
    const CMatrix raw = s.family[k] - s.tau(k) * CMatrix::Identity(d, d) - s.beta(k) * s.A;
    s.raw_residual = std::max(s.raw_residual, op_norm(raw) / scale);
    const CMatrix comp = p * s.family[k] * p - s.tau(k) * p - s.beta(k) * (p * s.A * p);
    s.compressed_residual = std::max(s.compressed_residual, op_norm(comp) / scale);
  }

  for (const Character& c : chars) s.A_values.push_back(ls_coefficient(c.values, s.tau, s.beta));
  for (const Character& c : s.compressed_characters.characters)
    s.C_values.push_back(ls_coefficient(c.values, s.tau, s.beta));
  auto affine = [&](const std::vector<Character>& cs, const std::vector<double>& coef) {
    for (size_t i = 0; i < cs.size(); ++i)
      for (int k = 0; k <= depth; ++k) {
        const double pred = s.tau(k) + coef[i] * s.beta(k);
        const double r = std::abs(cs[i].values(k) - pred) / std::max(1.0, std::abs(cs[i].values(k)));
        s.affine_residual = std::max(s.affine_residual, r);
      }
  };
  affine(chars, s.A_values);
  affine(s.compressed_characters.characters, s.C_values);
  return s;
}

std::vector<TripleRecord> enumerate_triples(const StructureData& s, const ToleranceConfig& cfg) {
  std::vector<TripleRecord> out;
  const int depth = s.depth;
  const auto& lambdas = s.characters.characters;
  const auto& gammas = s.compressed_characters.characters;
  for (size_t g = 0; g < gammas.size(); ++g)
    for (int m = 1; m <= depth - 1; ++m)
      for (size_t l = 0; l < lambdas.size(); ++l) {
        const RVector& lv = lambdas[l].values;
        const RVector& gv = gammas[g].values;
        const bool zero = lv(m) <= cfg.spectral_match_tol * family_scale(s.family[m]);
        double residual = 0.0;
        for (int k = 0; m + k <= depth; ++k) {
          const double side = zero ? s.tau(m + k) / s.tau(m) : lv(m + k) / lv(m);
          residual = std::max(residual, relative_gap(gv(k), side));
        }
        if (residual <= cfg.spectral_match_tol)
          out.push_back({static_cast<int>(l), static_cast<int>(g), m, residual, zero});
      }
  std::sort(out.begin(), out.end(), [](const TripleRecord& a, const TripleRecord& b) {
    if (a.gamma_char != b.gamma_char) return a.gamma_char < b.gamma_char;
    if (a.m != b.m) return a.m < b.m;
    return a.lambda_char < b.lambda_char;
  });
  return out;
}

double oleg_residual(const StructureData& s, const TripleRecord& t) {
  const RVector& lv = s.characters.characters.at(static_cast<size_t>(t.lambda_char)).values;
  const RVector& gv = s.compressed_characters.characters.at(static_cast<size_t>(t.gamma_char)).values;
  double worst = 0.0;
  for (int k = 0; t.m + k <= s.depth; ++k) {
    const double lhs = lv(t.m) * gv(k);
    const double rhs = lv(t.m + k);
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

CorrespondenceReport spectral_correspondence_check(const OperatorModel& t, const ChainDecomposition& chain,
                                                   const ToleranceConfig& cfg) {
  (void)t;
  const int depth = chain.depth;
  if (depth < 2) fail(ErrorKind::PreconditionViolated, "correspondence check needs K >= 2");
  CorrespondenceReport rep;
  auto compress = [&](const Subspace& v) {
    std::vector<CMatrix> fam;
    for (int k = 0; k <= depth; ++k) fam.push_back(symmetrized(v.frame.adjoint() * chain.grams[k] * v.frame));
    return fam;
  };
  rep.moduli_spectrum = spectrum_with_identity(compress(chain.moduli), cfg);
  const auto& lambdas = rep.moduli_spectrum.characters;
  for (int n = 0; n < depth; ++n) {
    const Subspace& vn = chain.V[static_cast<size_t>(n)];
    if (vn.dim() == 0) {
      rep.level_spectra.emplace_back();
      continue;
    }
    JointSpectrum level;
    try {
      level = spectrum_with_identity(compress(vn), cfg);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NotCommuting) throw;
      rep.noncommuting_levels.push_back(n);
      rep.level_spectra.emplace_back();
      continue;
    }
    for (size_t g = 0; g < level.characters.size(); ++g) {
      const RVector& gv = level.characters[g].values;
      CorrespondenceEntry best{n, static_cast<int>(g), -1, 1e300};
      for (size_t l = 0; l < lambdas.size(); ++l) {
        const RVector& lv = lambdas[l].values;
        double worst = 0.0;
        for (int k = 0; k + n + 1 <= depth; ++k)
          for (int j = 1; k + n + j <= depth; ++j) {
            if (gv(k) <= 0.0 || lv(k + n) <= 0.0) continue;
            worst = std::max(worst, relative_gap(gv(k + j) / gv(k), lv(k + n + j) / lv(k + n)));
          }
        if (worst < best.residual) {
          best.residual = worst;
          best.lambda_char = static_cast<int>(l);
        }
      }
      rep.worst_residual = std::max(rep.worst_residual, best.residual);
      rep.entries.push_back(best);
    }
    rep.level_spectra.push_back(std::move(level));
  }
  return rep;
}

SpectralProperties spectral_properties(const StructureData& s, const std::vector<TripleRecord>& triples,
                                       const ToleranceConfig& cfg) {
  SpectralProperties p;
  const int depth = s.depth;
  p.tau_positive = (s.tau.array() > 0.0).all();
  p.beta_zero_at_origin = s.beta(0) == 0.0;

  const auto& chars = s.characters.characters;
  if (s.lambda_index >= 0 && s.mu_index >= 0) {
    const RVector& lv = chars[static_cast<size_t>(s.lambda_index)].values;
    const RVector& mv = chars[static_cast<size_t>(s.mu_index)].values;
    for (int m = 1; m <= depth; ++m) {
      const double scale = family_scale(s.family[m]);
      if (std::abs(lv(m) - mv(m)) > cfg.spectral_match_tol * scale) continue;
      ++p.nicenice_cases;
      const CVector r = s.family[m] * s.e - s.tau(m) * s.e;
      p.nicenice_residual = std::max(p.nicenice_residual, r.norm() / scale);
    }
  }

  auto colio = [&](const std::vector<Character>& cs) {
    for (const Character& c : cs)
      for (int k = 1; k <= depth; ++k) {
        if (c.values(k) > cfg.spectral_match_tol * family_scale(s.family[k])) continue;
        ++p.colio_cases;
        for (int j = k + 1; j <= depth; ++j)
          if (c.values(j) > 10.0 * cfg.spectral_match_tol * family_scale(s.family[j])) p.colio_holds = false;
      }
  };
  colio(chars);
  colio(s.compressed_characters.characters);

  for (int k = 1; k <= depth; ++k) {
    bool zero_point = false;
    for (const Character& c : chars)
      zero_point = zero_point || c.values(k) <= cfg.spectral_match_tol * family_scale(s.family[k]);
    if (!zero_point) continue;
    ++p.queen_cases;
    for (int j = 1; k + j <= depth; ++j) {
      const double pred = s.tau(k + j) / s.tau(k) * s.beta(k);
      p.queen_residual = std::max(p.queen_residual, std::abs(s.beta(k + j) - pred));
    }
  }

  if (s.moduli.dim() == 2) {
    for (const TripleRecord& t : triples) {
      const double gap = std::abs(s.A_values[static_cast<size_t>(t.lambda_char)] -
                                  s.C_values[static_cast<size_t>(t.gamma_char)]);
      if (!(gap > cfg.spectral_match_tol)) p.terrible_holds = false;
    }
  }
  if (s.moduli.dim() >= 3) p.total_holds = s.compressed_characters.characters.size() >= 2;

  const RVector base = s.beta.tail(depth);
  if (base.norm() > 0.0) {
    for (size_t i = 0; i < chars.size(); ++i)
      for (size_t j = i + 1; j < chars.size(); ++j) {
        const RVector other = (chars[i].values - chars[j].values).tail(depth);
        if (other.norm() == 0.0) continue;
        const double cosine = std::abs(other.dot(base)) / (other.norm() * base.norm());
        p.beta_collinearity = std::max(p.beta_collinearity, std::sqrt(std::max(0.0, 1.0 - cosine * cosine)));
      }
  }
  return p;
}

}  // namespace hclab
