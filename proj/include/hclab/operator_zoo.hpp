#pragma once

// Finite models of the operator families, with window metadata: window(k) is
// the number of leading indices on which the k-th gram power of the matrix
// agrees with that of the infinite operator it truncates.

#include "hclab/matrix_kernel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hclab {

struct ToleranceConfig {
  double rank_tol = 1e-10;
  double commutator_tol = 1e-9;
  double relation_tol = 1e-8;
  double spectral_match_tol = 1e-7;
  int depth = 6;
  std::uint64_t seed = 7;

  int max_m() const { return depth - 1; }
  void validate() const;  // throws InvalidArgument
};

struct OperatorModel {
  std::string family;
  CMatrix matrix;
  // |i - j| > bandwidth implies a zero entry, except the listed exceptions.
  int bandwidth = 0;
  std::vector<std::pair<Index, Index>> rank_one_exceptions;
  // Leading indices lost per power of T; 0 for exact models.
  int window_step = 0;
  bool exact = true;
  // A_q for the aq family.
  std::optional<CMatrix> companion;
  // aq family: max entry of S*A_qS - q A_q on the interior window.
  double window_certificate = 0.0;
  // After a window-preserving conjugation: U acts nontrivially only on the
  // first mixing_extent coordinates, so windows shorter than that are void.
  Index mixing_extent = 0;

  Index size() const { return matrix.rows(); }
  Index window(int k) const;
  // Largest depth K' <= requested with N - K'*step >= 8 (requested when exact).
  int effective_depth(int requested) const;
};

// Checks the sparsity declaration; returns the largest off-band entry.
double bandwidth_violation(const OperatorModel& t);

OperatorModel weighted_shift(const std::vector<cplx>& weights, Index n);
OperatorModel shift_plus_rank_one(const std::vector<cplx>& weights, cplx a, Index column, Index n);
OperatorModel hardy_example(cplx a, Index n);
OperatorModel projection_product(const CMatrix& p, const CMatrix& q, double tol = 1e-12);
OperatorModel composition_operator(const std::vector<Index>& psi, const std::vector<cplx>& xi, Index n);

double default_aq_r(double q);
CMatrix aq_companion(double q, Index n);
OperatorModel aq_operator(double q, double r, Index n, double rank_tol = kDefaultRankTol);

OperatorModel cauchy_dual(const OperatorModel& t, const ToleranceConfig& cfg);

// Exact model wrapping a raw matrix.
OperatorModel matrix_model(const CMatrix& m);

// U* T U for a unitary U that maps span{e_0..e_{w-1}} onto itself, where w is
// the smallest window used at the requested depth; the window metadata then
// stays meaningful. Exact models accept any unitary.
OperatorModel conjugate_by_unitary(const OperatorModel& t, const CMatrix& u);

// Unit vector e_i of length n.
CVector basis_vector(Index n, Index i);

// Unweighted shift S e_k = e_{k+1} on C^n.
CMatrix unweighted_shift(Index n);

}  // namespace hclab
