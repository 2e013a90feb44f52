#pragma once

// Gram powers T_k = T*^k T^k and the commutation verdicts built on them.

#include "hclab/operator_zoo.hpp"

#include <string>
#include <vector>

namespace hclab {

CMatrix gram_power(const OperatorModel& t, int k);

// T_0..T_K, computed as T_k = T* T_{k-1} T and symmetrized.
std::vector<CMatrix> gram_powers(const OperatorModel& t, int depth);

// T^k T*^k for k = 0..K.
std::vector<CMatrix> cogram_powers(const OperatorModel& t, int depth);

struct PairResidual {
  int j = 0;
  int k = 0;
  // "gram-gram" ([T_j, T_k]), "gram-cogram" ([T_j, T^kT*^k]) or "cogram-cogram".
  std::string kind;
  double residual = 0.0;
};

struct CommutationReport {
  int depth = 0;
  Index window = 0;
  double max_half_residual = 0.0;
  double max_full_residual = 0.0;
  bool half_centered = false;
  bool centered = false;
  bool full_checked = false;
  std::vector<PairResidual> pairs;
};

// ||[X, Y]||_F on the leading w x w block, over ||X_w||_2 * ||Y_w||_2.
double scaled_commutator(const CMatrix& x, const CMatrix& y, Index w);

CommutationReport half_centered_check(const OperatorModel& t, const ToleranceConfig& cfg);
CommutationReport centered_check(const OperatorModel& t, const ToleranceConfig& cfg);

struct CriterionResult {
  bool holds = false;
  bool vacuous = false;  // ker T* = 0 on the window (EmptyKernel)
  double residual = 0.0;
  Index kernel_dim = 0;
};

// T_k E ⊆ E for k = 1..K with E = ker T*.
CriterionResult centered_criterion(const OperatorModel& t, const ToleranceConfig& cfg);

}  // namespace hclab
