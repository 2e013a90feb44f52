#pragma once

// Four-term relation search, the τ/β annihilating polynomials, the
// shift-plus-rank-one reconstruction, and the final verdict.

#include "hclab/spectral_lab.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hclab {

struct RelationCertificate {
  // (a, b, c, d) on (I, T_n, T_m, T_{n+m}); unit norm, first significant entry
  // positive. For n == m the system has three columns and c is stored as 0.
  RVector coefficients = RVector::Zero(4);
  int n = 0;
  int m = 0;
  bool degenerate = false;
  Index window = 0;
  double operator_residual = 0.0;  // ||sum c_i M_i||_F / max ||c_i M_i||_F on the window block
  double tau_recurrence_residual = 0.0;
  double beta_recurrence_residual = 0.0;
  double restriction_residual = 0.0;  // worst over V_k
  bool accepted = false;
};

struct RelationSearch {
  std::vector<RelationCertificate> scanned;  // in search order
  std::optional<RelationCertificate> accepted;
  RelationCertificate best;  // smallest residual seen
};

// Scans n <= m, n + m <= K by (n + m, n) and accepts the first pair whose
// residual is within relation_tol. Never throws for a missing relation.
RelationSearch relation_search(const OperatorModel& t, const ToleranceConfig& cfg);

// The accepted certificate, or NoRelationFound.
RelationCertificate relation_detect(const OperatorModel& t, const ToleranceConfig& cfg);

// Worst |a x_k + b x_{k+n} + c x_{k+m} + d x_{k+n+m}| relative to the largest
// term, over all k with k + n + m inside the sequence.
double recurrence_residual(const RelationCertificate& cert, const RVector& seq);

struct PolynomialSet {
  // Coefficients in increasing degree.
  std::vector<double> P1, P2, Q1, Q2, P;
  double tau_residual = 0.0;
  double beta_residual = 0.0;
  bool identically_zero = false;
  double constant_term = 0.0;
};

// Throws DegenerateTriples when P vanishes within tolerance.
PolynomialSet polynomial_machinery(const TripleRecord& first, const TripleRecord& second, const StructureData& s,
                                   const ToleranceConfig& cfg);

// (P(S*) x)_k = sum_j p_j x_{k+j}; worst relative residual over valid k.
double annihilation_residual(const std::vector<double>& p, const RVector& seq);

struct ShiftRankOneCertificate {
  CMatrix basis;             // columns x_0..x_{L-1}
  std::vector<cplx> weights; // <T x_k, x_{k+1}>
  cplx a{0.0, 0.0};          // <T x_n, x_0>
  int n = 0;                 // column carrying the rank-one term
  double reconstruction_residual = 0.0;
  double joint_eigen_residual = 0.0;
  double orthonormality_residual = 0.0;
};

ShiftRankOneCertificate shift_rank_one_reconstruct(const OperatorModel& t, const StructureData& s,
                                                   const std::vector<TripleRecord>& triples,
                                                   const ToleranceConfig& cfg);

struct WeightedShiftCertificate {
  CMatrix basis;  // normalized T^k e
  std::vector<cplx> weights;
  double residual = 0.0;
};

WeightedShiftCertificate weighted_shift_certificate(const OperatorModel& t, const ChainDecomposition& chain,
                                                    const ToleranceConfig& cfg);

enum class Verdict { CenteredWeightedShift, ShiftPlusRankOne, FourTermRelation, Both, Inconclusive };
const char* to_string(Verdict v);

struct ClassificationReport {
  Verdict verdict = Verdict::Inconclusive;
  int depth = 0;
  Index window = 0;
  double half_centered_residual = 0.0;
  Index dim_E = 0;
  Index dim_moduli = 0;
  std::vector<Index> dims_V;
  std::vector<TripleRecord> triples;
  double closed_range_sigma = 0.0;  // sigma_min of the T_1 window block / ||T_1||
  bool closed_range_flag = false;
  double span_deficiency = 0.0;     // mass of the window block outside the extended chain
  std::optional<RelationCertificate> relation;
  RelationCertificate best_relation;
  std::optional<ShiftRankOneCertificate> reconstruction;
  std::optional<WeightedShiftCertificate> weighted_shift;
  std::optional<StructureData> structure;
  std::vector<std::string> diagnostics;
};

// Throws PreconditionViolated when T is not half-centered, dim E != 1, or the
// window block is not injective. Disagreeing branches give Inconclusive.
ClassificationReport classify(const OperatorModel& t, const ToleranceConfig& cfg);

// Mass of the first w coordinates outside the chain X_0 + T X_0 + ... grown
// until it stops changing.
double chain_span_deficiency(const OperatorModel& t, const Subspace& moduli, Index w, double rank_tol);

}  // namespace hclab
