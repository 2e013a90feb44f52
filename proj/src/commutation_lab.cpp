#include "hclab/commutation_lab.hpp"

#include "hclab/errors.hpp"
#include "hclab/subspace_engine.hpp"

#include <algorithm>

namespace hclab {

namespace {

CMatrix symmetrized(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

}  // namespace

std::vector<CMatrix> gram_powers(const OperatorModel& t, int depth) {
  if (depth < 0) fail(ErrorKind::InvalidArgument, "gram power index must be nonnegative");
  if (depth > 0 && t.window(depth) < 1)
    fail(ErrorKind::WindowExhausted, "window(" + std::to_string(depth) + ") is empty for N = " +
                                         std::to_string(t.size()));
  const Index n = t.size();
  std::vector<CMatrix> out;
  out.reserve(static_cast<size_t>(depth) + 1);
  out.push_back(CMatrix::Identity(n, n));
  for (int k = 1; k <= depth; ++k) out.push_back(symmetrized(t.matrix.adjoint() * out.back() * t.matrix));
  return out;
}

CMatrix gram_power(const OperatorModel& t, int k) { return gram_powers(t, k).back(); }

std::vector<CMatrix> cogram_powers(const OperatorModel& t, int depth) {
  const Index n = t.size();
  std::vector<CMatrix> out;
  out.push_back(CMatrix::Identity(n, n));
  for (int k = 1; k <= depth; ++k) out.push_back(symmetrized(t.matrix * out.back() * t.matrix.adjoint()));
  return out;
}

double scaled_commutator(const CMatrix& x, const CMatrix& y, Index w) {
  const CMatrix c = (x * y - y * x).topLeftCorner(w, w);
  const double scale = op_norm(x.topLeftCorner(w, w)) * op_norm(y.topLeftCorner(w, w));
  const double num = c.norm();
  if (scale == 0.0) return num == 0.0 ? 0.0 : num;
  return num / scale;
}

namespace {

CommutationReport run_check(const OperatorModel& t, const ToleranceConfig& cfg, bool full) {
  cfg.validate();
  const int depth = cfg.depth;
  const Index w = t.window(2 * depth);
  if (w < 1)
    fail(ErrorKind::WindowExhausted, "window(2K) is empty: N = " + std::to_string(t.size()) +
                                         ", K = " + std::to_string(depth));
  const std::vector<CMatrix> grams = gram_powers(t, depth);
  CommutationReport rep;
  rep.depth = depth;
  rep.window = w;
  rep.full_checked = full;
  for (int j = 1; j <= depth; ++j)
    for (int k = j + 1; k <= depth; ++k) {
      const double r = scaled_commutator(grams[j], grams[k], w);
      rep.pairs.push_back({j, k, "gram-gram", r});
      rep.max_half_residual = std::max(rep.max_half_residual, r);
    }
  rep.max_full_residual = rep.max_half_residual;
  if (full) {
    const std::vector<CMatrix> cograms = cogram_powers(t, depth);
    for (int j = 1; j <= depth; ++j)
      for (int k = 1; k <= depth; ++k) {
        const double r = scaled_commutator(grams[j], cograms[k], w);
        rep.pairs.push_back({j, k, "gram-cogram", r});
        rep.max_full_residual = std::max(rep.max_full_residual, r);
      }
    for (int j = 1; j <= depth; ++j)
      for (int k = j + 1; k <= depth; ++k) {
        const double r = scaled_commutator(cograms[j], cograms[k], w);
        rep.pairs.push_back({j, k, "cogram-cogram", r});
        rep.max_full_residual = std::max(rep.max_full_residual, r);
      }
  }
  rep.half_centered = rep.max_half_residual <= cfg.commutator_tol;
  rep.centered = full && rep.max_full_residual <= cfg.commutator_tol;
  return rep;
}

}  // namespace

CommutationReport half_centered_check(const OperatorModel& t, const ToleranceConfig& cfg) {
  return run_check(t, cfg, false);
}

CommutationReport centered_check(const OperatorModel& t, const ToleranceConfig& cfg) {
  return run_check(t, cfg, true);
}

CriterionResult centered_criterion(const OperatorModel& t, const ToleranceConfig& cfg) {
  cfg.validate();
  const Subspace e = kernel_of_adjoint(t, cfg);
  CriterionResult out;
  out.kernel_dim = e.dim();
  if (e.dim() == 0) {
    out.vacuous = true;
    out.holds = true;
    return out;
  }
  const Index w = std::max<Index>(1, t.window(cfg.depth));
  const std::vector<CMatrix> grams = gram_powers(t, cfg.depth);
  for (int k = 1; k <= cfg.depth; ++k) {
    const double scale = op_norm(grams[k].topLeftCorner(w, w));
    const double leak = leakage(grams[k] * e.frame, e);
    out.residual = std::max(out.residual, scale > 0.0 ? leak / scale : leak);
  }
  out.holds = out.residual <= cfg.commutator_tol;
  return out;
}

}  // namespace hclab
