#pragma once

#include "fiberkit/core.hpp"

#include <vector>

namespace fiberkit {

/// Full-rank lattice generated by the columns of an invertible basis matrix.
class Lattice {
 public:
  static constexpr double kDeterminantFloor = 1e-12;

  /// Throws InvalidLattice when the basis is not square or |det| <= 1e-12.
  explicit Lattice(Matrix basis);

  static Lattice identity(int dim);

  int dim() const { return static_cast<int>(basis_.rows()); }
  const Matrix& basis() const { return basis_; }
  const Matrix& inverse() const { return inverse_; }
  double covolume() const { return std::abs(det_); }

  /// Lattice point basis * coords.
  Vector point(const IVector& coords) const;

  /// Integer coordinates of the lattice point nearest to x.
  IVector nearest_coords(const Vector& x) const;

  /// True when basis^T h is integral to `tol`, i.e. <h, lambda> in Z for all lambda.
  bool in_dual(const Vector& h, double tol = 1e-9) const;

  /// Radius of the smallest origin-centred ball containing the closed
  /// fundamental domain.
  double domain_radius() const;

 private:
  Matrix basis_;
  Matrix inverse_;
  double det_ = 0.0;
};

/// Lattice generated by (M^T)^{-1}.
Lattice dual(const Lattice& lattice);

/// True when both bases generate the same point set (M1^{-1} M2 unimodular).
bool same_lattice(const Lattice& a, const Lattice& b, double tol = 1e-9);

struct Reduction {
  Vector residue;  ///< point of the fundamental domain M[-1/2, 1/2)^d
  IVector coords;  ///< x = residue + M * coords
};

/// Splits x into a fundamental-domain residue and a lattice translate.
/// Coordinates exactly at +1/2 wrap to -1/2.
Reduction reduce_to_fundamental(const Vector& x, const Lattice& lattice);

/// All lattice points within Euclidean distance `radius` of `center`, in
/// lexicographic order. Throws std::invalid_argument for negative radius.
std::vector<Vector> lattice_points_in_radius(const Lattice& lattice, const Vector& center,
                                             double radius);

}  // namespace fiberkit
