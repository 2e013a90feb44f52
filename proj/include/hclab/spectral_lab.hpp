#pragma once

// Joint spectra of the commuting gram-power family, the tau / beta sequences,
// the structure operator A, and the triple set.

#include "hclab/subspace_engine.hpp"

#include <vector>

namespace hclab {

struct Character {
  RVector values;     // one value per family member
  Subspace frame;     // in the coordinates of the diagonalized space
  Index multiplicity = 0;
};

struct JointSpectrum {
  std::vector<Character> characters;
  double max_residual = 0.0;  // max ||A_i v - χ_i v|| / ||A_i||
};

// Characters sorted by their values, first member first.
JointSpectrum joint_diagonalize(const std::vector<CMatrix>& family, const ToleranceConfig& cfg);

// Prepends the value 1 for T_0 = I.
RVector with_identity(const RVector& values);

struct StructureData {
  int depth = 0;
  Subspace moduli;        // ambient frame F
  CVector e;           // unit kernel vector in moduli coordinates
  CMatrix complement;  // frame G of moduli ⊖ E in moduli coordinates
  std::vector<CMatrix> family;      // F* T_k F, k = 0..K
  std::vector<CMatrix> compressed;  // G* (P T_k P) G, k = 0..K
  RVector tau;                      // τ_0..τ_K
  RVector beta;                     // β_0..β_K, raw
  RVector beta_normalized;          // first significant entry scaled to +1
  double beta_scale = 1.0;          // beta = beta_scale * beta_normalized
  bool nonzero_beta = false;
  int a_source_k = -1;              // k used to solve A
  CMatrix A;                        // on moduli coordinates
  CMatrix C;                        // G* A G
  JointSpectrum characters;         // on moduli, values over k = 0..K
  JointSpectrum compressed_characters;  // on moduli ⊖ E, values over k = 0..K
  std::vector<double> A_values;     // per moduli character
  std::vector<double> C_values;     // per compressed character
  int lambda_index = -1;            // extreme characters defining β
  int mu_index = -1;
  double raw_residual = 0.0;        // T_k|moduli vs τ_k I + β_k A
  double compressed_residual = 0.0; // P T_k P vs τ_k P + β_k C
  double affine_residual = 0.0;     // λ(T_k) vs τ_k + A_λ β_k (and C_γ)
};

StructureData structure_extract(const OperatorModel& t, const ChainDecomposition& chain,
                                const ToleranceConfig& cfg);

// β from an arbitrary pair of distinct characters (for the collinearity check).
RVector beta_from_pair(const StructureData& s, int lambda_index, int mu_index);

struct TripleRecord {
  int lambda_char = -1;
  int gamma_char = -1;
  int m = 0;
  double residual = 0.0;
  bool zero_branch = false;  // λ(T_m) <= tol, τ ratio used
};

// |x - y| / max(|x|, |y|), zero when both vanish.
double relative_gap(double x, double y);

std::vector<TripleRecord> enumerate_triples(const StructureData& s, const ToleranceConfig& cfg);

// max over k of |λ(T_m) γ(P T_k P) - λ(T_{m+k})| relative to |λ(T_{m+k})|.
double oleg_residual(const StructureData& s, const TripleRecord& t);

struct CorrespondenceEntry {
  int level = 0;
  int gamma_char = -1;
  int lambda_char = -1;
  double residual = 0.0;
};

struct CorrespondenceReport {
  std::vector<CorrespondenceEntry> entries;
  double worst_residual = 0.0;
  // Levels whose compressed family fails the commutator test; no
  // correspondence is claimed for them.
  std::vector<int> noncommuting_levels;
  std::vector<JointSpectrum> level_spectra;  // characters of T_j on V_n
  JointSpectrum moduli_spectrum;             // characters on moduli
};

CorrespondenceReport spectral_correspondence_check(const OperatorModel& t, const ChainDecomposition& chain,
                                                   const ToleranceConfig& cfg);

struct SpectralProperties {
  bool tau_positive = false;
  bool beta_zero_at_origin = false;
  double nicenice_residual = 0.0;  // worst ||T_m e - τ_m e|| over coincidences
  int nicenice_cases = 0;
  bool colio_holds = true;
  int colio_cases = 0;
  double queen_residual = 0.0;
  int queen_cases = 0;
  bool terrible_holds = true;   // dim moduli = 2: A_λ != C_γ for every triple
  bool total_holds = true;      // dim moduli >= 3: >= 2 compressed characters
  double beta_collinearity = 0.0;  // worst |sin| between β from different pairs
};

SpectralProperties spectral_properties(const StructureData& s, const std::vector<TripleRecord>& triples,
                                       const ToleranceConfig& cfg);

}  // namespace hclab
