#pragma once

// Dense complex matrix and subspace primitives.
//
// Every rank decision in the library goes through the tolerances passed to
// these functions; nothing here keeps global state.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <string_view>

namespace hclab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kDefaultRankTol = 1e-10;

// Orthonormal frame (ambient x d) together with the tolerance that decided d.
struct Subspace {
  CMatrix frame;
  double rank_tol = kDefaultRankTol;

  Index ambient_dim() const { return frame.rows(); }
  Index dim() const { return frame.cols(); }
  CMatrix projector() const { return frame * frame.adjoint(); }

  static Subspace zero(Index ambient, double rank_tol = kDefaultRankTol);
  static Subspace whole(Index ambient, double rank_tol = kDefaultRankTol);
};

struct EigResult {
  RVector values;   // ascending
  CMatrix vectors;  // orthonormal columns, vectors.col(i) belongs to values(i)
};

struct PolarPair {
  CMatrix isometry_part;
  CMatrix positive_part;
};

struct SingularTriplet {
  double sigma_min = 0.0;
  CVector right_vector;
};

void require_finite(const CMatrix& m, const char* what);
bool all_finite(const CMatrix& m);

// Spectral norm (largest singular value).
double op_norm(const CMatrix& m);

// Hermitian eigendecomposition after symmetrization. Throws NotHermitian when
// ||H - H*||_F > tol * ||H||_F.
EigResult hermitian_eig(const CMatrix& h, double tol = kDefaultRankTol);

// Principal square root of a positive semidefinite matrix. Eigenvalues below
// -tol * max|eig| raise NotPSD; smaller negative noise is clamped to zero.
CMatrix positive_sqrt(const CMatrix& h, double tol = kDefaultRankTol);

// Moore-Penrose pseudo-inverse of a Hermitian PSD matrix; eigenvalues at or
// below rank_tol * max eigenvalue are treated as zero.
CMatrix psd_pinv(const CMatrix& h, double rank_tol = kDefaultRankTol);

// M = isometry_part * positive_part with positive_part = (M*M)^{1/2} and the
// isometry zero on ker(positive_part).
PolarPair polar(const CMatrix& m, double rank_tol = kDefaultRankTol);

// Modified Gram-Schmidt with one reorthogonalization pass over the columns of
// `vectors`, in order. A column is kept when its residual after projection
// exceeds rank_tol * (largest input column norm).
Subspace orthonormalize(const CMatrix& vectors, double rank_tol = kDefaultRankTol);

// Frame of the numerically significant column range (left singular vectors
// with sigma > rank_tol * sigma_max).
Subspace range_of(const CMatrix& m, double rank_tol = kDefaultRankTol);

// Frame of the numerical kernel (right singular vectors with
// sigma <= rank_tol * sigma_max, including the structurally missing ones).
Subspace kernel_of(const CMatrix& m, double rank_tol = kDefaultRankTol);

Subspace subspace_sum(const Subspace& a, const Subspace& b);

// a ∩ b^⊥ for b ⊆ a; NotContained when the containment residual of b in a
// exceeds contain_tol.
Subspace subspace_ominus(const Subspace& a, const Subspace& b, double contain_tol = 1e-8);

CVector project(const Subspace& a, const CVector& v);

// Spectral norm of (I - P_outer) * frame(inner): 0 when inner ⊆ outer.
double containment_residual(const Subspace& inner, const Subspace& outer);

// Spectral norm of (I - P_outer) * m.
double leakage(const CMatrix& m, const Subspace& outer);

// Distance between the orthogonal projectors of two subspaces (spectral norm).
double projector_distance(const Subspace& a, const Subspace& b);

SingularTriplet smallest_singular_triplet(const CMatrix& m);

// Matrix text format: "rows cols" header, then row-major "re+imj" tokens.
std::string format_matrix(const CMatrix& m);
CMatrix parse_matrix(std::string_view text);
std::string format_complex(cplx z);
cplx parse_complex(std::string_view token);

}  // namespace hclab
