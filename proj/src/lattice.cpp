#include "fiberkit/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace fiberkit {

Lattice::Lattice(Matrix basis) : basis_(std::move(basis)) {
  if (basis_.rows() == 0 || basis_.rows() != basis_.cols()) {
    throw InvalidLattice("lattice basis must be a nonempty square matrix");
  }
  if (!basis_.allFinite()) throw InvalidLattice("lattice basis has non-finite entries");
  Eigen::FullPivLU<Matrix> lu(basis_);
  det_ = lu.determinant();
  if (!(std::abs(det_) > kDeterminantFloor)) {
    throw InvalidLattice("lattice basis is singular (|det| = " + std::to_string(std::abs(det_)) +
                         ")");
  }
  inverse_ = lu.inverse();
}

Lattice Lattice::identity(int dim) { return Lattice(Matrix::Identity(dim, dim)); }

Vector Lattice::point(const IVector& coords) const { return basis_ * coords.cast<double>(); }

IVector Lattice::nearest_coords(const Vector& x) const {
  const Vector c = inverse_ * x;
  IVector z(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) z[i] = std::lround(c[i]);
  return z;
}

bool Lattice::in_dual(const Vector& h, double tol) const {
  if (h.size() != basis_.rows()) return false;
  const Vector p = basis_.transpose() * h;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (std::abs(p[i] - std::round(p[i])) > tol) return false;
  }
  return true;
}

double Lattice::domain_radius() const {
  const int d = dim();
  double best = 0.0;
  Vector s(d);
  for (long mask = 0; mask < (1L << d); ++mask) {
    for (int i = 0; i < d; ++i) s[i] = (mask >> i) & 1 ? 0.5 : -0.5;
    best = std::max(best, (basis_ * s).norm());
  }
  return best;
}

Lattice dual(const Lattice& lattice) { return Lattice(lattice.inverse().transpose()); }

bool same_lattice(const Lattice& a, const Lattice& b, double tol) {
  if (a.dim() != b.dim()) return false;
  const Matrix t = a.inverse() * b.basis();
  Matrix snapped = t;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    snapped.data()[i] = std::round(t.data()[i]);
    if (std::abs(t.data()[i] - snapped.data()[i]) > tol) return false;
  }
  return std::abs(std::abs(snapped.determinant()) - 1.0) < 0.5;
}

Reduction reduce_to_fundamental(const Vector& x, const Lattice& lattice) {
  const Vector c = lattice.inverse() * x;
  IVector z(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    double zi = std::floor(c[i] + 0.5);
    const double f = c[i] - zi;
    // floor(c + 1/2) can land one off when c + 1/2 rounds.
    if (f >= 0.5) zi += 1.0;
    if (f < -0.5) zi -= 1.0;
    z[i] = static_cast<long>(zi);
  }
  return {x - lattice.point(z), z};
}

std::vector<Vector> lattice_points_in_radius(const Lattice& lattice, const Vector& center,
                                             double radius) {
  if (radius < 0.0) throw std::invalid_argument("radius must be nonnegative");
  const int d = lattice.dim();
  if (center.size() != d) throw DimensionMismatch("center dimension differs from lattice");

  // Coordinate box enclosing the ball: |z_i - (M^{-1} c)_i| <= radius * ||row_i(M^{-1})||.
  const Vector c = lattice.inverse() * center;
  IVector lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    const double span = radius * lattice.inverse().row(i).norm();
    lo[i] = static_cast<long>(std::floor(c[i] - span - 1e-9));
    hi[i] = static_cast<long>(std::ceil(c[i] + span + 1e-9));
  }

  const double limit = radius + 1e-12 * std::max(1.0, radius);
  std::vector<Vector> out;
  IVector z = lo;
  while (true) {
    Vector p = lattice.point(z);
    if ((p - center).norm() <= limit) out.push_back(std::move(p));
    int axis = 0;
    while (axis < d && z[axis] == hi[axis]) {
      z[axis] = lo[axis];
      ++axis;
    }
    if (axis == d) break;
    ++z[axis];
  }
  std::sort(out.begin(), out.end(), LexLess{});
  return out;
}

}  // namespace fiberkit
