#include "hclab/matrix_kernel.hpp"

#include "hclab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace hclab {

namespace {

CMatrix hermitian_part(const CMatrix& h) { return (h + h.adjoint()) * 0.5; }

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    fail(ErrorKind::DimensionMismatch,
         std::string(what) + " expects a square matrix, got " + std::to_string(m.rows()) + "x" +
             std::to_string(m.cols()));
  }
}

// Rotate v so that its largest-modulus entry is real and positive.
void fix_phase(CVector& v) {
  if (v.size() == 0) return;
  Index best = 0;
  double best_abs = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs > 0.0) v *= std::conj(v(best)) / best_abs;
}

}  // namespace

Subspace Subspace::zero(Index ambient, double rank_tol) {
  return Subspace{CMatrix(ambient, 0), rank_tol};
}

Subspace Subspace::whole(Index ambient, double rank_tol) {
  return Subspace{CMatrix::Identity(ambient, ambient), rank_tol};
}

bool all_finite(const CMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

void require_finite(const CMatrix& m, const char* what) {
  if (!all_finite(m)) fail(ErrorKind::NonFinite, std::string(what) + " has a NaN or Inf entry");
}

double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

EigResult hermitian_eig(const CMatrix& h, double tol) {
  require_square(h, "hermitian_eig");
  require_finite(h, "hermitian_eig input");
  const double asym = (h - h.adjoint()).norm();
  if (asym > tol * h.norm()) {
    fail(ErrorKind::NotHermitian, "symmetry residual " + std::to_string(asym) +
                                      " exceeds tolerance relative to norm " +
                                      std::to_string(h.norm()));
  }
  if (h.rows() == 0) return {RVector(0), CMatrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
  if (es.info() != Eigen::Success) fail(ErrorKind::NonFinite, "eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

CMatrix positive_sqrt(const CMatrix& h, double tol) {
  EigResult eig = hermitian_eig(h, tol);
  const Index n = eig.values.size();
  if (n == 0) return CMatrix(0, 0);
  const double scale = eig.values.cwiseAbs().maxCoeff();
  if (eig.values(0) < -tol * scale) {
    fail(ErrorKind::NotPSD, "eigenvalue " + std::to_string(eig.values(0)) + " is materially negative");
  }
  RVector roots = eig.values.cwiseMax(0.0).cwiseSqrt();
  CMatrix out = eig.vectors * roots.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
  return hermitian_part(out);
}

CMatrix psd_pinv(const CMatrix& h, double rank_tol) {
  EigResult eig = hermitian_eig(h, rank_tol);
  const Index n = eig.values.size();
  if (n == 0) return CMatrix(0, 0);
  const double top = eig.values.cwiseAbs().maxCoeff();
  RVector inv(n);
  for (Index i = 0; i < n; ++i)
    inv(i) = (eig.values(i) > rank_tol * top && top > 0.0) ? 1.0 / eig.values(i) : 0.0;
  CMatrix out = eig.vectors * inv.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
  return hermitian_part(out);
}

PolarPair polar(const CMatrix& m, double rank_tol) {
  require_square(m, "polar");
  require_finite(m, "polar input");
  const Index n = m.rows();
  if (n == 0) return {CMatrix(0, 0), CMatrix(0, 0)};
  // The SVD route gives the same pair as (M*M)^{1/2} and M * pinv(p), with
  // better accuracy on the small singular values.
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const CMatrix& u = svd.matrixU();
  const CMatrix& v = svd.matrixV();
  Index r = 0;
  while (r < n && s(r) > rank_tol * s(0) && s(0) > 0.0) ++r;
  PolarPair out;
  out.isometry_part = u.leftCols(r) * v.leftCols(r).adjoint();
  out.positive_part = hermitian_part(v * s.cast<cplx>().asDiagonal() * v.adjoint());
  return out;
}

Subspace orthonormalize(const CMatrix& vectors, double rank_tol) {
  if (vectors.cols() == 0) fail(ErrorKind::EmptyInput, "orthonormalize needs at least one vector");
  require_finite(vectors, "orthonormalize input");
  const Index n = vectors.rows();
  double max_norm = 0.0;
  for (Index j = 0; j < vectors.cols(); ++j) max_norm = std::max(max_norm, vectors.col(j).norm());
  CMatrix q(n, std::min<Index>(n, vectors.cols()));
  Index d = 0;
  if (max_norm == 0.0) return Subspace{CMatrix(n, 0), rank_tol};
  const double cutoff = rank_tol * max_norm;
  for (Index j = 0; j < vectors.cols() && d < n; ++j) {
    CVector w = vectors.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < d; ++i) w -= q.col(i) * q.col(i).dot(w);
    }
    const double r = w.norm();
    if (r > cutoff) q.col(d++) = w / r;
  }
  return Subspace{q.leftCols(d), rank_tol};
}

Subspace range_of(const CMatrix& m, double rank_tol) {
  require_finite(m, "range_of input");
  if (m.cols() == 0 || m.rows() == 0) return Subspace{CMatrix(m.rows(), 0), rank_tol};
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const RVector& s = svd.singularValues();
  Index r = 0;
  while (r < s.size() && s(0) > 0.0 && s(r) > rank_tol * s(0)) ++r;
  return Subspace{svd.matrixU().leftCols(r), rank_tol};
}

Subspace kernel_of(const CMatrix& m, double rank_tol) {
  require_finite(m, "kernel_of input");
  const Index c = m.cols();
  if (c == 0) return Subspace{CMatrix(0, 0), rank_tol};
  if (m.rows() == 0) return Subspace::whole(c, rank_tol);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  Index r = 0;
  while (r < s.size() && s(0) > 0.0 && s(r) > rank_tol * s(0)) ++r;
  CMatrix frame = svd.matrixV().rightCols(c - r);
  for (Index j = 0; j < frame.cols(); ++j) {
    CVector col = frame.col(j);
    fix_phase(col);
    frame.col(j) = col;
  }
  return Subspace{frame, rank_tol};
}

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    fail(ErrorKind::DimensionMismatch, "subspace_sum ambient dimensions differ");
  const double tol = std::max(a.rank_tol, b.rank_tol);
  if (a.dim() + b.dim() == 0) return Subspace::zero(a.ambient_dim(), tol);
  CMatrix both(a.ambient_dim(), a.dim() + b.dim());
  both << a.frame, b.frame;
  return orthonormalize(both, tol);
}

Subspace subspace_ominus(const Subspace& a, const Subspace& b, double contain_tol) {
  if (a.ambient_dim() != b.ambient_dim())
    fail(ErrorKind::DimensionMismatch, "subspace_ominus ambient dimensions differ");
  if (b.dim() == 0) return a;
  const double res = containment_residual(b, a);
  if (res > contain_tol || b.dim() > a.dim()) {
    fail(ErrorKind::NotContained,
         "subtrahend leaves the minuend with residual " + std::to_string(res));
  }
  const Index da = a.dim();
  const Index db = b.dim();
  if (da == db) return Subspace{CMatrix(a.ambient_dim(), 0), a.rank_tol};
  CMatrix overlap = b.frame.adjoint() * a.frame;  // db x da
  Eigen::JacobiSVD<CMatrix> svd(overlap, Eigen::ComputeFullV);
  CMatrix frame = a.frame * svd.matrixV().rightCols(da - db);
  return Subspace{frame, a.rank_tol};
}

CVector project(const Subspace& a, const CVector& v) {
  if (a.ambient_dim() != v.size()) fail(ErrorKind::DimensionMismatch, "project dimension mismatch");
  return a.frame * (a.frame.adjoint() * v);
}

double leakage(const CMatrix& m, const Subspace& outer) {
  if (m.cols() == 0) return 0.0;
  CMatrix rest = m - outer.frame * (outer.frame.adjoint() * m);
  return op_norm(rest);
}

double containment_residual(const Subspace& inner, const Subspace& outer) {
  return leakage(inner.frame, outer);
}

double projector_distance(const Subspace& a, const Subspace& b) {
  return op_norm(a.projector() - b.projector());
}

SingularTriplet smallest_singular_triplet(const CMatrix& m) {
  if (m.size() == 0) fail(ErrorKind::EmptyInput, "smallest_singular_triplet of an empty matrix");
  require_finite(m, "smallest_singular_triplet input");
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const Index c = m.cols();
  SingularTriplet out;
  out.sigma_min = (m.rows() < c) ? 0.0 : svd.singularValues()(c - 1);
  out.right_vector = svd.matrixV().col(c - 1);
  fix_phase(out.right_vector);
  return out;
}

std::string format_complex(cplx z) {
  char re[40];
  char im[40];
  std::snprintf(re, sizeof re, "%.17g", z.real());
  std::snprintf(im, sizeof im, "%.17g", std::fabs(z.imag()));
  std::string out = re;
  out += std::signbit(z.imag()) ? '-' : '+';
  out += im;
  out += 'j';
  return out;
}

namespace {

double parse_real(std::string_view s, std::string_view whole) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::SpecParse, "bad complex token '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

cplx parse_complex(std::string_view token) {
  if (token.empty()) fail(ErrorKind::SpecParse, "empty complex token");
  std::string_view body = token;
  if (body.back() != 'j' && body.back() != 'i') return {parse_real(body, token), 0.0};
  body.remove_suffix(1);
  size_t split = std::string_view::npos;
  for (size_t p = body.size(); p-- > 1;) {
    if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  if (split == std::string_view::npos) return {0.0, parse_real(body, token)};
  return {parse_real(body.substr(0, split), token), parse_real(body.substr(split), token)};
}

std::string format_matrix(const CMatrix& m) {
  require_finite(m, "format_matrix input");
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_complex(m(i, j));
    }
    out += '\n';
  }
  return out;
}

CMatrix parse_matrix(std::string_view text) {
  std::istringstream in{std::string(text)};
  long rows = -1;
  long cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    fail(ErrorKind::SpecParse, "matrix header must be 'rows cols'");
  CMatrix m(rows, cols);
  std::string tok;
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      if (!(in >> tok)) fail(ErrorKind::SpecParse, "matrix text ends before all entries were read");
      m(i, j) = parse_complex(tok);
    }
  }
  if (in >> tok) fail(ErrorKind::SpecParse, "trailing token '" + tok + "' after matrix entries");
  if (!all_finite(m)) fail(ErrorKind::NonFinite, "matrix text contains a non-finite entry");
  return m;
}

}  // namespace hclab
