#pragma once

#include "fiberkit/core.hpp"
#include "fiberkit/fiber_model.hpp"

#include <limits>
#include <string>
#include <vector>

namespace fiberkit {

/// Range operator of a shift-preserving operator on the space with fiber
/// spaces `range`: mats[i] is R(omega_i) in the coordinates of range.bases[i].
struct RangeOperatorField {
  RangeField range;
  std::vector<CMatrix> mats;

  /// Throws DimensionMismatch unless every mats[i] is m(omega_i) square.
  void validate() const;
  /// B R B* on the full window.
  CMatrix window_matrix(std::size_t i) const;
};

/// sup over the grid of the spectral norm of R(omega).
double op_norm(const RangeOperatorField& r);

struct AdjointReport {
  RangeOperatorField adjoint;
  bool normal = false;
  double max_commutator = 0.0;
  double tolerance = 0.0;  ///< 1e-8 (1 + ||R||^2)
};

AdjointReport adjoint_and_normality(const RangeOperatorField& r);

struct KernelImage {
  RangeField kernel;
  RangeField image;
};

KernelImage kernel_image_fields(const RangeOperatorField& r, double rank_tol = 1e-9);

/// One eigenvalue per sample, eigenvalues ordered by (real, imaginary)
/// ascending and the first taken.
struct EigenSelection {
  std::vector<Complex> lambda;
  FiberVectorField eigvec;  ///< window coordinates, phase-normalized, zero off the spectrum
};

EigenSelection select_eigenvalue_field(const RangeOperatorField& r);

struct TriangularDecomposition {
  /// psi_1..psi_l, unit on their supports.
  std::vector<FiberVectorField> generators;
  /// Per sample, dims of the nested fibers V_1 .. V_l.
  std::vector<std::vector<std::size_t>> nested_dims;
  /// Per sample, Q* R Q with Q the psi-fibers in range coordinates.
  std::vector<CMatrix> tri_mats;
  std::vector<CMatrix> change_of_basis;
  /// Per sample, the eigenvalue selected at each recursion step.
  std::vector<std::vector<Complex>> selected;
};

/// Select an eigenvector, pass to the orthogonal complement, compress, repeat.
TriangularDecomposition triangularize(const RangeOperatorField& r);

struct TriangularResiduals {
  double strict_lower = 0.0;   ///< max |tri(r, c)|, r > c
  double unitary = 0.0;        ///< max |Q*Q - I|
  double invariance = 0.0;     ///< max ||(I - P_j) R P_j||
  double diagonal = 0.0;       ///< max |tri(j, j) - selected_j|
  bool nested_spectra = true;  ///< support(psi_{j+1}) within support(psi_j)
};

TriangularResiduals check_triangular(const RangeOperatorField& r,
                                     const TriangularDecomposition& t);

struct DiagonalDecomposition {
  std::vector<FiberVectorField> generators;
  /// eigenvalues[j][i] = lambda_j(omega_i); zero where m(omega_i) <= j.
  std::vector<std::vector<Complex>> eigenvalues;
  std::vector<CMatrix> change_of_basis;
  double max_commutator = 0.0;
};

/// Throws NotNormal with the measured commutator for non-normal fields.
DiagonalDecomposition diagonalize_normal(const RangeOperatorField& r);

/// max over samples of ||R - sum_j lambda_j q_j q_j*||.
double reconstruction_residual(const RangeOperatorField& r, const DiagonalDecomposition& d);
/// max over samples and j of ||P_j R (I - P_j)||.
double reducing_residual(const RangeOperatorField& r, const DiagonalDecomposition& d);

/// One coefficient a(h) of a sequence on the dual lattice.
struct Tap {
  Vector h;
  Complex value;
};

/// a-hat(omega) = sum_h a(h) e^{-2 pi i omega.h}.
Complex multiplier_symbol(const std::vector<Tap>& taps, const Vector& omega);

struct SEigenvalue {
  std::vector<Complex> lambda_field;
  std::vector<Tap> coeffs;  ///< inverse discrete transform of lambda_field on the H-window

  /// Forward transform of coeffs at every grid sample.
  std::vector<Complex> resynthesize(const FiberSampleGrid& grid) const;
};

/// Dual-lattice points whose coordinates form one full alias class of the
/// grid ([-floor(n/2), ceil(n/2) - 1] per axis), optionally restricted to a
/// Euclidean radius. Lexicographic order.
std::vector<Vector> h_window(const FiberSampleGrid& grid,
                             double radius = std::numeric_limits<double>::infinity());

std::vector<SEigenvalue> s_eigenvalue_extract(
    const DiagonalDecomposition& d, double h_window_radius = std::numeric_limits<double>::infinity());

/// Multiplication of every fiber by a-hat(omega).
FiberVectorField lambda_a_apply(const std::vector<Tap>& taps, const FiberVectorField& f);

/// Fibers of sum_h a(h) T_h f for the kernel f with transform e_a on the set;
/// T_h f is again a kernel, with frequency a - h.
FiberVectorField lambda_a_finite_sum(const std::vector<Tap>& taps, const MultiTileConfig& cfg,
                                     const Vector& a, WindowPtr window, GridPtr grid);

/// R(omega) = e^{-2 pi i omega.h} on every fiber. Throws NotInDual unless
/// <h, lambda> is integral for all lambda.
RangeOperatorField shift_operator_field(const Vector& h, const RangeField& x);

/// R(omega) = a-hat(omega) on every fiber.
RangeOperatorField multiplier_operator_field(const std::vector<Tap>& taps, const RangeField& x);

/// Named matrix fields over omega.
struct MatrixFieldSpec {
  enum class Kind { constant, diagonal_exponentials, nilpotent };
  Kind kind = Kind::constant;
  CMatrix constant;              ///< constant
  std::vector<Vector> h;         ///< diagonal_exponentials: one h per diagonal entry; nilpotent: h[0]
};

/// constant: the given matrix; diagonal_exponentials: diag(e^{-2 pi i omega.h_j});
/// nilpotent: g(omega) = e^{-2 pi i omega.h} on the superdiagonal. Throws
/// DimensionMismatch where the matrix size differs from m(omega) > 0.
RangeOperatorField matrix_operator_field(const MatrixFieldSpec& spec, const RangeField& x);

}  // namespace fiberkit
