#include "hclab/rng.hpp"

#include <cmath>
#include <numbers>

namespace hclab {

double SeededRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

cplx SeededRng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return cplx(re, im) / std::sqrt(2.0);
}

CMatrix haar_unitary(Index n, SeededRng& rng) {
  CMatrix z(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) z(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

std::vector<cplx> random_weights(std::size_t count, SeededRng& rng, double lo, double hi) {
  std::vector<cplx> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double modulus = rng.uniform(lo, hi);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    out.push_back(std::polar(modulus, phase));
  }
  return out;
}

std::vector<cplx> random_positive_weights(std::size_t count, SeededRng& rng, double lo, double hi) {
  std::vector<cplx> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.emplace_back(rng.uniform(lo, hi), 0.0);
  return out;
}

}  // namespace hclab
