#include "hclab/subspace_engine.hpp"

#include "hclab/commutation_lab.hpp"
#include "hclab/errors.hpp"

#include <algorithm>

namespace hclab {

const char* to_string(ClosureStatus s) {
  return s == ClosureStatus::Stable ? "stable" : "capped_at_ambient";
}

Subspace kernel_of_adjoint(const OperatorModel& t, const ToleranceConfig& cfg) {
  return kernel_of(t.matrix.adjoint(), cfg.rank_tol);
}

ModuliSubspace moduli_closure(const Subspace& e, const std::vector<CMatrix>& grams, Index window) {
  if (e.dim() == 0) fail(ErrorKind::EmptyKernel, "moduli subspace needs a nonempty E");
  const Index n = e.ambient_dim();
  // The closure runs on the leading window block, which is the exact
  // compression of the untruncated gram powers; the truncation corner would
  // otherwise seed spurious directions at the rank-tolerance level.
  const Index w = std::clamp<Index>(window, 1, n);
  std::vector<double> scale(grams.size(), 1.0);
  for (size_t k = 1; k < grams.size(); ++k) {
    const double s = op_norm(grams[k]);
    scale[k] = s > 0.0 ? s : 1.0;
  }
  ModuliSubspace out;
  const double e_tail = w < n ? e.frame.bottomRows(n - w).norm() : 0.0;
  CMatrix frame = orthonormalize(e.frame.topRows(w), e.rank_tol).frame;
  Index dim = frame.cols();
  int stable = 0;
  while (stable < 2 && dim < w) {
    const Index r = frame.cols();
    CMatrix gen(w, r * static_cast<Index>(grams.size()));
    gen.leftCols(r) = frame;
    for (size_t k = 1; k < grams.size(); ++k)
      gen.middleCols(static_cast<Index>(k) * r, r) = grams[k].topLeftCorner(w, w) * frame / scale[k];
    frame = orthonormalize(gen, e.rank_tol).frame;
    ++out.sweeps;
    stable = (frame.cols() == dim) ? stable + 1 : 0;
    dim = frame.cols();
  }
  out.status = (dim >= w) ? ClosureStatus::CappedAtAmbient : ClosureStatus::Stable;
  CMatrix full = CMatrix::Zero(n, dim);
  full.topRows(w) = frame;
  out.space = Subspace{full, e.rank_tol};
  // How far E and the gram images of the closure reach past the window.
  out.tail_mass = e_tail;
  if (w < n)
    for (size_t k = 1; k < grams.size(); ++k)
      out.tail_mass = std::max(out.tail_mass, (grams[k] * full).bottomRows(n - w).norm() / scale[k]);
  return out;
}

int analysis_depth(const OperatorModel& t, const ToleranceConfig& cfg) {
  cfg.validate();
  const int depth = t.effective_depth(cfg.depth);
  if (depth < 1 || t.window(depth) < 1)
    fail(ErrorKind::WindowExhausted, "N = " + std::to_string(t.size()) +
                                         " leaves no window of size >= 8 at depth 1");
  return depth;
}

ModuliSubspace moduli_subspace(const OperatorModel& t, const ToleranceConfig& cfg) {
  const int depth = analysis_depth(t, cfg);
  const Subspace e = kernel_of_adjoint(t, cfg);
  const Index w = t.window(depth);
  ModuliSubspace m = moduli_closure(e, gram_powers(t, depth), w);
  if (m.status == ClosureStatus::Stable && m.tail_mass > cfg.relation_tol)
    fail(ErrorKind::WindowExhausted, "moduli subspace reaches past the valid window (tail mass " +
                                         std::to_string(m.tail_mass) + ")");
  return m;
}

double injectivity_margin(const OperatorModel& t, Index w) {
  const double norm = op_norm(t.matrix);
  if (norm == 0.0 || w < 1) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(t.matrix.leftCols(w));
  const RVector& s = svd.singularValues();
  if (t.size() < w) return 0.0;
  return s(s.size() - 1) / norm;
}

std::vector<Index> ChainDecomposition::dims(const std::vector<Subspace>& spaces) const {
  std::vector<Index> out;
  out.reserve(spaces.size());
  for (const auto& s : spaces) out.push_back(s.dim());
  return out;
}

ChainDecomposition chain_decomposition(const OperatorModel& t, const ToleranceConfig& cfg) {
  const int depth = analysis_depth(t, cfg);
  const Index w = t.window(depth);
  const double tol = cfg.rank_tol;
  ChainDecomposition c;
  c.depth = depth;
  c.window = w;
  c.injectivity_sigma = injectivity_margin(t, w);
  if (!(c.injectivity_sigma > tol))
    fail(ErrorKind::NotInjectiveOnWindow,
         "sigma_min of the window block is " + std::to_string(c.injectivity_sigma));

  c.grams = gram_powers(t, depth);
  c.E = kernel_of_adjoint(t, cfg);
  if (c.E.dim() == 0) fail(ErrorKind::EmptyKernel, "ker T* is trivial; the chain is empty");
  ModuliSubspace m = moduli_closure(c.E, c.grams, w);
  // A closure that fills the window stands for a moduli space larger than the
  // model; its coupling past the window is then expected.
  if (m.status == ClosureStatus::Stable && m.tail_mass > cfg.relation_tol)
    fail(ErrorKind::WindowExhausted, "moduli subspace reaches past the valid window (tail mass " +
                                         std::to_string(m.tail_mass) + ")");
  c.moduli = m.space;
  c.closure_status = m.status;
  c.closure_sweeps = m.sweeps;

  const Index n = t.size();
  // The chain is grown with the window compression of T: coordinates past the
  // window are not represented, so nothing may flow into them.
  c.window_operator = CMatrix::Zero(n, n);
  c.window_operator.topLeftCorner(w, w) = t.matrix.topLeftCorner(w, w);
  const CMatrix& tw = c.window_operator;
  c.X.push_back(c.moduli);
  c.V.push_back(c.moduli);
  c.powers_ME.push_back(c.moduli);
  c.transit.push_back(c.moduli);
  for (int k = 1; k <= depth; ++k) {
    const Subspace image = range_of(tw * c.powers_ME.back().frame, tol);
    const CMatrix moved = tw * c.X.back().frame;
    Subspace xk = subspace_sum(c.X.back(), image);
    Subspace vk = subspace_ominus(xk, c.X.back());
    // T X_{k-1} lies in X_k only up to the truncation of the moduli closure,
    // so project before taking the complement and report what was cut.
    const CMatrix moved_in = xk.frame * (xk.frame.adjoint() * moved);
    const double moved_norm = moved.norm();
    if (moved_norm > 0.0)
      c.transit_leakage = std::max(c.transit_leakage, (moved - moved_in).norm() / moved_norm);
    c.transit.push_back(subspace_ominus(xk, range_of(moved_in, tol)));
    c.powers_ME.push_back(image);
    c.X.push_back(std::move(xk));
    c.V.push_back(std::move(vk));
  }

  CMatrix power = CMatrix::Identity(n, n);
  c.H.push_back(Subspace::whole(n, tol));
  for (int k = 1; k <= depth + 1; ++k) {
    power = t.matrix * power;
    c.H.push_back(range_of(power, tol));
  }
  for (int k = 0; k < depth; ++k) c.defects.push_back(subspace_ominus(c.H[k], c.H[k + 1]));

  for (size_t k = 1; k < c.V.size(); ++k)
    c.orthogonality_residual =
        std::max(c.orthogonality_residual, op_norm(c.X[k - 1].frame.adjoint() * c.V[k].frame));
  for (const Subspace& v : c.V)
    for (int k = 1; k <= depth; ++k) {
      const double scale = op_norm(c.grams[k].topLeftCorner(w, w));
      const CMatrix image = c.grams[k].topLeftCorner(w, n) * v.frame;
      CMatrix padded = CMatrix::Zero(n, v.dim());
      padded.topRows(w) = image;
      c.invariance_residual = std::max(c.invariance_residual, leakage(padded, v) / (scale > 0 ? scale : 1.0));
    }
  return c;
}

namespace {

double rel(double num, double den) { return den > 0.0 ? num / den : num; }

void check_half_centered(const OperatorModel& t, const ToleranceConfig& cfg, int depth) {
  ToleranceConfig local = cfg;
  local.depth = depth;
  const CommutationReport rep = half_centered_check(t, local);
  if (!rep.half_centered)
    fail(ErrorKind::NotHalfCentered, "gram powers fail to commute (residual " +
                                         std::to_string(rep.max_half_residual) + ")");
}

IsometryTower build_tower(const OperatorModel& t, const std::vector<CMatrix>& grams,
                          const std::vector<Subspace>& ranges, int depth, Index w,
                          const ToleranceConfig& cfg) {
  const Index n = t.size();
  const double tol = cfg.rank_tol;
  IsometryTower tower;
  tower.depth = depth;
  tower.window = w;

  TowerLevel base;
  base.n = 0;
  base.power = CMatrix::Identity(n, n);
  base.theta = base.power;
  base.theta_composed = base.power;
  base.r_sqrt = base.power;
  base.r_product = base.power;
  tower.levels.push_back(base);

  for (int k = 1; k <= depth; ++k) {
    const TowerLevel& prev = tower.levels.back();
    TowerLevel lvl;
    lvl.n = k;
    lvl.power = t.matrix * prev.power;
    lvl.theta = polar(lvl.power, tol).isometry_part;
    const CMatrix level_iso = polar(t.matrix * ranges[k - 1].projector(), tol).isometry_part;
    lvl.theta_composed = level_iso * prev.theta_composed;
    lvl.r_sqrt = positive_sqrt(grams[k], tol);
    const CMatrix factor = positive_sqrt(
        (prev.theta.adjoint() * grams[1] * prev.theta + (prev.theta.adjoint() * grams[1] * prev.theta).adjoint()) *
            0.5,
        tol);
    lvl.r_product = factor * prev.r_product;

    const double gram_norm = op_norm(grams[k].topLeftCorner(w, w));
    const double power_norm = op_norm(lvl.power);
    lvl.theta_residual = op_norm((lvl.theta - lvl.theta_composed).leftCols(w));
    lvl.reconstruction_residual = rel(op_norm((lvl.theta * lvl.r_product - lvl.power).leftCols(w)), power_norm);
    lvl.gram_residual =
        rel(op_norm((lvl.r_product.adjoint() * lvl.r_product - grams[k]).topLeftCorner(w, w)), gram_norm);
    lvl.r_mutual_residual =
        rel(op_norm((lvl.r_sqrt - lvl.r_product).topLeftCorner(w, w)), op_norm(lvl.r_sqrt.topLeftCorner(w, w)));
    lvl.range_residual = op_norm(lvl.theta * lvl.theta.adjoint() - ranges[k].projector());
    tower.levels.push_back(std::move(lvl));
  }
  return tower;
}

}  // namespace

IsometryTower isometry_tower(const OperatorModel& t, const ToleranceConfig& cfg) {
  const int depth = analysis_depth(t, cfg);
  const Index w = t.window(depth);
  if (!(injectivity_margin(t, w) > cfg.rank_tol))
    fail(ErrorKind::NotInjectiveOnWindow, "T is not injective on its window");
  check_half_centered(t, cfg, depth);
  const std::vector<CMatrix> grams = gram_powers(t, depth);
  std::vector<Subspace> ranges;
  CMatrix power = CMatrix::Identity(t.size(), t.size());
  ranges.push_back(Subspace::whole(t.size(), cfg.rank_tol));
  for (int k = 1; k <= depth; ++k) {
    power = t.matrix * power;
    ranges.push_back(range_of(power, cfg.rank_tol));
  }
  return build_tower(t, grams, ranges, depth, w, cfg);
}

IsometryTower isometry_tower(const OperatorModel& t, const ChainDecomposition& chain,
                             const ToleranceConfig& cfg) {
  check_half_centered(t, cfg, chain.depth);
  return build_tower(t, chain.grams, chain.H, chain.depth, chain.window, cfg);
}

const StructureCheck& ChainStructureReport::check(const std::string& tag) const {
  for (const auto& c : checks)
    if (c.tag == tag) return c;
  fail(ErrorKind::InvalidArgument, "no structure check tagged '" + tag + "'");
}

ChainStructureReport verify_chain_structure(const OperatorModel& t, const ChainDecomposition& chain,
                                            const IsometryTower& tower, const ToleranceConfig& cfg) {
  if (tower.depth != chain.depth)
    fail(ErrorKind::InvalidArgument, "chain and tower were built at different depths");
  const int depth = chain.depth;
  const Index w = chain.window;
  const double tol = cfg.rank_tol;
  const CMatrix& tm = chain.window_operator;

  ChainStructureReport rep;
  rep.depth = depth;
  rep.dims_V = chain.dims(chain.V);
  rep.dims_X = chain.dims(chain.X);
  rep.dims_transit = chain.dims(chain.transit);
  rep.dims_defects = chain.dims(chain.defects);
  rep.dims_decreasing = true;
  rep.checks.reserve(32);  // checks are filled through references below
  for (size_t k = 1; k < rep.dims_V.size(); ++k)
    if (rep.dims_V[k] > rep.dims_V[k - 1]) rep.dims_decreasing = false;

  auto residual_check = [&](const std::string& tag, double limit) -> StructureCheck& {
    rep.checks.push_back({tag, 0.0, limit, false, false, false, {}});
    return rep.checks.back();
  };
  auto record = [](StructureCheck& c, double v) {
    c.per_level.push_back(v);
    c.value = std::max(c.value, v);
  };
  const double tnorm = op_norm(tm);

  // T V_k ⊆ V_{k+1} ⊕ (X_k ⊖ T X_{k-1})
  StructureCheck& space1 = residual_check("space1", cfg.relation_tol);
  for (int k = 0; k < depth; ++k) {
    const Subspace target = subspace_sum(chain.V[k + 1], chain.transit[k]);
    record(space1, rel(leakage(tm * chain.V[k].frame, target), tnorm));
  }

  // P_{V_m} T^{m-n} V_n = V_m, certified by the dim(V_m)-th singular value.
  StructureCheck isisis{"isisis", 0.0, cfg.relation_tol, true, false, false, {}};
  double worst_sigma = 1.0;
  {
    std::vector<CMatrix> powers{CMatrix::Identity(t.size(), t.size())};
    for (int k = 1; k <= depth; ++k) powers.push_back(tm * powers.back());
    for (int nlev = 0; nlev <= depth; ++nlev)
      for (int mlev = nlev; mlev <= depth; ++mlev) {
        const Subspace& vn = chain.V[nlev];
        const Subspace& vm = chain.V[mlev];
        if (vm.dim() == 0) continue;
        const CMatrix block = vm.frame.adjoint() * powers[mlev - nlev] * vn.frame;
        double sigma = 0.0;
        if (vn.dim() >= vm.dim()) {
          Eigen::JacobiSVD<CMatrix> svd(block);
          sigma = svd.singularValues()(vm.dim() - 1);
        }
        const double cert = rel(sigma, op_norm(powers[mlev - nlev]));
        isisis.per_level.push_back(cert);
        worst_sigma = std::min(worst_sigma, cert);
      }
  }
  isisis.value = worst_sigma;
  rep.checks.push_back(isisis);

  // v in V_m with Tv ⊥ moduli gives Tv in V_{m+1}.
  StructureCheck& jups = residual_check("jups", cfg.relation_tol);
  for (int m = 0; m < depth; ++m) {
    const Subspace& vm = chain.V[m];
    if (vm.dim() == 0) {
      record(jups, 0.0);
      continue;
    }
    const CMatrix image = tm * vm.frame;
    const Subspace null = kernel_of(chain.moduli.frame.adjoint() * image, tol);
    if (null.dim() == 0) {
      record(jups, 0.0);
      continue;
    }
    const CMatrix samples = image * null.frame;
    double worst = 0.0;
    for (Index j = 0; j < samples.cols(); ++j) {
      // Tv = 0 lies in every subspace.
      const double len = samples.col(j).norm();
      if (len <= 10.0 * tol * tnorm) continue;
      CMatrix col = samples.col(j) / len;
      worst = std::max(worst, leakage(col, chain.V[m + 1]));
    }
    record(jups, worst);
  }

  // E_n ⊆ T^n moduli
  StructureCheck& saknar = residual_check("saknar", cfg.relation_tol);
  for (int k = 0; k < depth; ++k) record(saknar, containment_residual(chain.defects[k], chain.powers_ME[k]));

  StructureCheck& labann = residual_check("labann", cfg.commutator_tol);
  StructureCheck& thet = residual_check("thet", cfg.relation_tol);
  StructureCheck& key = residual_check("key", cfg.commutator_tol);
  StructureCheck& rform = residual_check("rform", cfg.relation_tol);
  for (size_t k = 1; k < tower.levels.size(); ++k) {
    record(labann, tower.levels[k].gram_residual);
    record(thet, tower.levels[k].reconstruction_residual);
    record(key, tower.levels[k].theta_residual);
    record(rform, tower.levels[k].r_mutual_residual);
  }

  // [P_{V_m}, T_k] = 0
  StructureCheck& fuio = residual_check("fuio", cfg.commutator_tol);
  for (const Subspace& v : chain.V) {
    const CMatrix p = v.projector();
    double worst = 0.0;
    for (int k = 1; k <= depth; ++k) {
      const CMatrix c = (p * chain.grams[k] - chain.grams[k] * p).topLeftCorner(w, w);
      worst = std::max(worst, rel(op_norm(c), op_norm(chain.grams[k].topLeftCorner(w, w))));
    }
    record(fuio, worst);
  }

  // T_j = (T|H_n)_j on V_m for m >= n, with (T|H_n)_j = P_{H_n} T_j P_{H_n}.
  StructureCheck& fukth = residual_check("fukth", cfg.commutator_tol);
  for (int nlev = 0; nlev <= depth; ++nlev) {
    const CMatrix ph = chain.H[nlev].projector();
    double worst = 0.0;
    for (int j = 1; j <= depth; ++j) {
      const CMatrix diff = chain.grams[j] - ph * chain.grams[j] * ph;
      const double scale = op_norm(chain.grams[j].topLeftCorner(w, w));
      for (int m = nlev; m <= depth; ++m) worst = std::max(worst, rel(op_norm(diff * chain.V[m].frame), scale));
    }
    record(fukth, worst);
  }

  // ⊕ V_k reproduces X_K and the span of the T^k moduli.
  StructureCheck& oplus = residual_check("oplus", 10.0 * cfg.rank_tol);
  {
    CMatrix sum = CMatrix::Zero(t.size(), t.size());
    for (const Subspace& v : chain.V) sum += v.projector();
    Subspace span = chain.powers_ME.front();
    for (size_t k = 1; k < chain.powers_ME.size(); ++k) span = subspace_sum(span, chain.powers_ME[k]);
    record(oplus, op_norm(sum - chain.X.back().projector()));
    record(oplus, op_norm(sum - span.projector()));
  }

  StructureCheck& orth = residual_check("orthogonality", 10.0 * cfg.rank_tol);
  record(orth, chain.orthogonality_residual);
  StructureCheck& inv = residual_check("invariance", cfg.commutator_tol);
  record(inv, chain.invariance_residual);

  StructureCheck nonzero{"e1", 0.0, 1.0, true, false, false, {}};
  double min_dim = 1e300;
  for (Index d : rep.dims_V) {
    nonzero.per_level.push_back(static_cast<double>(d));
    min_dim = std::min(min_dim, static_cast<double>(d));
  }
  nonzero.value = min_dim;
  // Nonvanishing layers are only claimed for a finite-dimensional moduli
  // space; a closure that fills the window stands for an infinite one.
  nonzero.vacuous = chain.closure_status == ClosureStatus::CappedAtAmbient;
  rep.checks.push_back(nonzero);

  rep.all_pass = rep.dims_decreasing;
  for (auto& c : rep.checks) {
    c.pass = c.vacuous || (c.lower_bound ? (c.value >= c.tolerance) : (c.value <= c.tolerance));
    rep.all_pass = rep.all_pass && c.pass;
  }
  return rep;
}

}  // namespace hclab
