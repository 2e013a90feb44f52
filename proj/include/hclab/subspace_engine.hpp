#pragma once

// E = ker T*, the moduli subspace moduli, the chain X_n / V_n / E_n, the isometry
// tower, and numerical checks of the chain structure.

#include "hclab/operator_zoo.hpp"

#include <string>
#include <vector>

namespace hclab {

Subspace kernel_of_adjoint(const OperatorModel& t, const ToleranceConfig& cfg);

enum class ClosureStatus { Stable, CappedAtAmbient };
const char* to_string(ClosureStatus s);

struct ModuliSubspace {
  Subspace space;
  ClosureStatus status = ClosureStatus::Stable;
  int sweeps = 0;
  // Frobenius mass of the frame on indices at or beyond the window.
  double tail_mass = 0.0;
};

// Iterated span of E under T_1..T_K until the dimension is unchanged for two
// consecutive sweeps (or reaches the ambient dimension).
ModuliSubspace moduli_closure(const Subspace& e, const std::vector<CMatrix>& grams, Index window);
ModuliSubspace moduli_subspace(const OperatorModel& t, const ToleranceConfig& cfg);

// Depth actually used by the injectivity-requiring analyses; throws
// WindowExhausted when the cap N - K*b >= 8 leaves nothing.
int analysis_depth(const OperatorModel& t, const ToleranceConfig& cfg);

// sigma_min of the window block T[:, 0:w] relative to ||T||.
double injectivity_margin(const OperatorModel& t, Index w);

struct ChainDecomposition {
  int depth = 0;
  Index window = 0;
  double injectivity_sigma = 0.0;
  Subspace E;
  Subspace moduli;
  ClosureStatus closure_status = ClosureStatus::Stable;
  int closure_sweeps = 0;
  CMatrix window_operator;           // T compressed to the leading window
  std::vector<CMatrix> grams;        // T_0..T_K
  std::vector<Subspace> X;           // X_0..X_K
  std::vector<Subspace> V;           // V_0..V_K
  std::vector<Subspace> powers_ME;   // T^n moduli, n = 0..K
  std::vector<Subspace> H;           // range(T^n), n = 0..K+1
  std::vector<Subspace> defects;     // E_n = H_n ⊖ H_{n+1}, n = 0..K-1
  std::vector<Subspace> transit;     // X_k ⊖ T X_{k-1}, k = 0..K
  double orthogonality_residual = 0.0;
  double invariance_residual = 0.0;
  double transit_leakage = 0.0;  // part of T X_{k-1} outside X_k

  std::vector<Index> dims(const std::vector<Subspace>& spaces) const;
};

ChainDecomposition chain_decomposition(const OperatorModel& t, const ToleranceConfig& cfg);

struct TowerLevel {
  int n = 0;
  CMatrix power;           // T^n
  CMatrix theta;           // isometric part of polar(T^n)
  CMatrix theta_composed;  // θ_{T|H_{n-1}} ... θ_{T|H_0}
  CMatrix r_sqrt;          // T_n^{1/2}
  CMatrix r_product;       // (θ_{n-1}* T_1 θ_{n-1})^{1/2} ... (θ_0* T_1 θ_0)^{1/2}
  double r_mutual_residual = 0.0;
  double theta_residual = 0.0;           // θ vs composed product
  double reconstruction_residual = 0.0;  // θ r_product vs T^n
  double gram_residual = 0.0;            // r_product* r_product vs T_n
  double range_residual = 0.0;           // θθ* vs P_{H_n}
};

struct IsometryTower {
  int depth = 0;
  Index window = 0;
  std::vector<TowerLevel> levels;  // n = 0..K
};

IsometryTower isometry_tower(const OperatorModel& t, const ToleranceConfig& cfg);
IsometryTower isometry_tower(const OperatorModel& t, const ChainDecomposition& chain,
                             const ToleranceConfig& cfg);

struct StructureCheck {
  std::string tag;
  double value = 0.0;
  double tolerance = 0.0;
  // false: value is a residual and must be <= tolerance;
  // true: value is a certificate and must be >= tolerance.
  bool lower_bound = false;
  bool pass = false;
  bool vacuous = false;  // hypothesis of the claim not met; passes trivially
  std::vector<double> per_level;
};

struct ChainStructureReport {
  int depth = 0;
  std::vector<Index> dims_V, dims_X, dims_transit, dims_defects;
  bool dims_decreasing = false;
  std::vector<StructureCheck> checks;
  bool all_pass = false;

  const StructureCheck& check(const std::string& tag) const;
};

ChainStructureReport verify_chain_structure(const OperatorModel& t, const ChainDecomposition& chain,
                                            const IsometryTower& tower, const ToleranceConfig& cfg);

}  // namespace hclab
