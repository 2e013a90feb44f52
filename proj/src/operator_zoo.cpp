#include "hclab/operator_zoo.hpp"

#include "hclab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace hclab {

void ToleranceConfig::validate() const {
  if (!(rank_tol > 0.0) || !(commutator_tol > 0.0) || !(relation_tol > 0.0) ||
      !(spectral_match_tol > 0.0)) {
    fail(ErrorKind::InvalidArgument, "all tolerances must be positive");
  }
  if (depth < 1) fail(ErrorKind::InvalidArgument, "depth K must be at least 1");
}

Index OperatorModel::window(int k) const {
  if (exact) return size();
  const Index w = size() - static_cast<Index>(k) * window_step;
  if (w < mixing_extent) return 0;
  return std::max<Index>(0, w);
}

int OperatorModel::effective_depth(int requested) const {
  if (exact || window_step == 0) return requested;
  const Index cap = (size() - 8) / window_step;
  return static_cast<int>(std::max<Index>(0, std::min<Index>(requested, cap)));
}

namespace {

int measured_bandwidth(const CMatrix& m, const std::vector<std::pair<Index, Index>>& skip) {
  Index band = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) == cplx(0.0, 0.0)) continue;
      if (std::find(skip.begin(), skip.end(), std::make_pair(i, j)) != skip.end()) continue;
      band = std::max<Index>(band, std::abs(i - j));
    }
  return static_cast<int>(band);
}

void require_size(Index n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "model size N must be positive");
}

}  // namespace

double bandwidth_violation(const OperatorModel& t) {
  double worst = 0.0;
  const auto& ex = t.rank_one_exceptions;
  for (Index j = 0; j < t.matrix.cols(); ++j)
    for (Index i = 0; i < t.matrix.rows(); ++i) {
      if (std::abs(i - j) <= t.bandwidth) continue;
      if (std::find(ex.begin(), ex.end(), std::make_pair(i, j)) != ex.end()) continue;
      worst = std::max(worst, std::abs(t.matrix(i, j)));
    }
  return worst;
}

CVector basis_vector(Index n, Index i) {
  CVector e = CVector::Zero(n);
  e(i) = 1.0;
  return e;
}

CMatrix unweighted_shift(Index n) {
  CMatrix s = CMatrix::Zero(n, n);
  for (Index k = 0; k + 1 < n; ++k) s(k + 1, k) = 1.0;
  return s;
}

OperatorModel weighted_shift(const std::vector<cplx>& weights, Index n) {
  require_size(n);
  if (static_cast<Index>(weights.size()) != n - 1) {
    fail(ErrorKind::InvalidArgument, "weighted_shift needs N-1 = " + std::to_string(n - 1) +
                                         " weights, got " + std::to_string(weights.size()));
  }
  OperatorModel t;
  t.family = "weighted_shift";
  t.matrix = CMatrix::Zero(n, n);
  for (Index k = 0; k + 1 < n; ++k) {
    const cplx w = weights[static_cast<size_t>(k)];
    if (w == cplx(0.0, 0.0)) fail(ErrorKind::ZeroWeight, "weight " + std::to_string(k) + " is zero");
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      fail(ErrorKind::NonFinite, "weight " + std::to_string(k) + " is not finite");
    t.matrix(k + 1, k) = w;
  }
  t.bandwidth = 1;
  t.window_step = 1;
  t.exact = false;
  return t;
}

OperatorModel shift_plus_rank_one(const std::vector<cplx>& weights, cplx a, Index column, Index n) {
  if (column < 0 || column >= n)
    fail(ErrorKind::IndexOutOfRange, "rank-one column " + std::to_string(column) + " outside 0.." +
                                         std::to_string(n - 1));
  OperatorModel t = weighted_shift(weights, n);
  t.family = "shift_plus_rank_one";
  t.matrix(0, column) += a;
  if (column > 1) t.rank_one_exceptions.emplace_back(0, column);
  return t;
}

OperatorModel hardy_example(cplx a, Index n) {
  OperatorModel t = shift_plus_rank_one(std::vector<cplx>(static_cast<size_t>(n - 1), a), 1.0, 0, n);
  t.family = "hardy";
  return t;
}

OperatorModel projection_product(const CMatrix& p, const CMatrix& q, double tol) {
  if (p.rows() != p.cols() || q.rows() != q.cols() || p.rows() != q.rows())
    fail(ErrorKind::DimensionMismatch, "projection_product needs two square matrices of equal size");
  require_finite(p, "P");
  require_finite(q, "Q");
  auto check = [tol](const CMatrix& x, const char* name) {
    const double scale = std::max(1.0, x.norm());
    if ((x * x - x).norm() > tol * scale || (x - x.adjoint()).norm() > tol * scale)
      fail(ErrorKind::NotProjection, std::string(name) + " is not an orthogonal projection");
  };
  check(p, "P");
  check(q, "Q");
  OperatorModel t;
  t.family = "projection_product";
  t.matrix = p * q;
  t.bandwidth = measured_bandwidth(t.matrix, {});
  t.exact = true;
  return t;
}

OperatorModel composition_operator(const std::vector<Index>& psi, const std::vector<cplx>& xi, Index n) {
  require_size(n);
  if (static_cast<Index>(psi.size()) != n || static_cast<Index>(xi.size()) != n)
    fail(ErrorKind::InvalidArgument, "composition_operator needs psi and xi of length N");
  OperatorModel t;
  t.family = "composition";
  t.matrix = CMatrix::Zero(n, n);
  for (Index x = 0; x < n; ++x) {
    const Index target = psi[static_cast<size_t>(x)];
    if (target < 0 || target >= n)
      fail(ErrorKind::IndexOutOfRange, "psi(" + std::to_string(x) + ") = " + std::to_string(target));
    t.matrix(x, target) += xi[static_cast<size_t>(x)];
  }
  require_finite(t.matrix, "composition weights");
  t.bandwidth = measured_bandwidth(t.matrix, {});
  t.exact = true;
  return t;
}

double default_aq_r(double q) { return 2.0 / (1.0 - q) + 1.0; }

CMatrix aq_companion(double q, Index n) {
  CMatrix a = CMatrix::Zero(n, n);
  double power = 1.0;
  for (Index k = 0; k + 1 < n; ++k) {
    a(k, k + 1) = power;
    a(k + 1, k) = power;
    power *= q;
  }
  return a;
}

OperatorModel aq_operator(double q, double r, Index n, double rank_tol) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::InvalidArgument, "q must lie in (0, 1)");
  if (!std::isfinite(r)) fail(ErrorKind::InvalidArgument, "r must be finite");
  if (n < 2) fail(ErrorKind::InvalidArgument, "aq_operator needs N >= 2");
  const CMatrix a = aq_companion(q, n);
  const CMatrix shifted = a + r * CMatrix::Identity(n, n);
  EigResult eig = hermitian_eig(shifted);
  if (eig.values(0) <= rank_tol)
    fail(ErrorKind::NotPositive, "A_q + rI has eigenvalue " + std::to_string(eig.values(0)));
  RVector root = eig.values.cwiseSqrt();
  RVector inv_root = root.cwiseInverse();
  const CMatrix half = eig.vectors * root.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
  const CMatrix inv_half = eig.vectors * inv_root.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
  const CMatrix s = unweighted_shift(n);

  OperatorModel t;
  t.family = "aq";
  t.matrix = half * s * inv_half;
  t.bandwidth = static_cast<int>(n - 1);
  t.window_step = 1;
  t.exact = false;
  t.companion = a;
  const CMatrix defect = s.adjoint() * a * s - q * a;
  t.window_certificate = defect.topLeftCorner(n - 1, n - 1).cwiseAbs().maxCoeff();
  return t;
}

OperatorModel cauchy_dual(const OperatorModel& t, const ToleranceConfig& cfg) {
  const int depth = std::max(1, t.effective_depth(cfg.depth));
  const Index w = t.window(depth);
  if (w < 1) fail(ErrorKind::WindowExhausted, "no window left for the Cauchy dual");
  const double norm = op_norm(t.matrix);
  Eigen::JacobiSVD<CMatrix> svd(t.matrix.leftCols(w));
  const RVector& s = svd.singularValues();
  const double sigma_min = (t.size() < w) ? 0.0 : s(s.size() - 1);
  if (!(sigma_min > cfg.rank_tol * norm))
    fail(ErrorKind::NotLeftInvertible, "T is not bounded below on its window (sigma_min = " +
                                           std::to_string(sigma_min) + ")");
  OperatorModel out = t;
  out.family = "cauchy_dual(" + t.family + ")";
  const CMatrix gram = t.matrix.adjoint() * t.matrix;
  out.matrix = t.matrix * psd_pinv(gram, cfg.rank_tol);
  out.companion.reset();
  out.bandwidth = measured_bandwidth(out.matrix, t.rank_one_exceptions);
  return out;
}

OperatorModel matrix_model(const CMatrix& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::DimensionMismatch, "operator matrix must be square");
  require_size(m.rows());
  require_finite(m, "operator matrix");
  OperatorModel t;
  t.family = "matrix";
  t.matrix = m;
  t.bandwidth = measured_bandwidth(m, {});
  t.exact = true;
  return t;
}

OperatorModel conjugate_by_unitary(const OperatorModel& t, const CMatrix& u) {
  const Index n = t.size();
  if (u.rows() != n || u.cols() != n) fail(ErrorKind::DimensionMismatch, "unitary has the wrong size");
  if ((u.adjoint() * u - CMatrix::Identity(n, n)).norm() > 1e-10 * n)
    fail(ErrorKind::InvalidArgument, "conjugating matrix is not unitary");
  Index extent = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (std::abs(u(i, j) - (i == j ? 1.0 : 0.0)) > 0.0) extent = std::max(extent, std::max(i, j) + 1);
  OperatorModel out = t;
  out.family = "conjugated(" + t.family + ")";
  out.matrix = u.adjoint() * t.matrix * u;
  out.rank_one_exceptions.clear();
  out.bandwidth = measured_bandwidth(out.matrix, {});
  if (out.companion) out.companion = u.adjoint() * (*out.companion) * u;
  out.mixing_extent = t.exact ? 0 : std::max(t.mixing_extent, extent);
  return out;
}

}  // namespace hclab
