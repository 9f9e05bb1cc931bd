#pragma once

#include "fiberkit/core.hpp"
#include "fiberkit/lattice.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace fiberkit {

/// Half-open box [low, high).
struct Box {
  Vector low;
  Vector high;

  bool contains(const Vector& x) const;
  double volume() const;
};

/// Finite union of half-open boxes, stored as pairwise disjoint boxes.
class BoxUnion {
 public:
  /// Empty set in dimension `dim`.
  explicit BoxUnion(int dim) : dim_(dim) {}

  /// Validates each box (finite corners, low < high componentwise) and
  /// normalizes the list into disjoint boxes covering the same union.
  explicit BoxUnion(const std::vector<Box>& boxes);

  int dim() const { return dim_; }
  bool empty() const { return boxes_.empty(); }
  const std::vector<Box>& boxes() const { return boxes_; }

  bool contains(const Vector& x) const;
  double measure() const;

  /// Largest distance from the origin to a box corner.
  double circumscribed_radius() const;

  BoxUnion translated(const Vector& shift) const;
  BoxUnion intersected(const BoxUnion& other) const;

  /// True when x lies within `eps` of the boundary of some box.
  bool near_boundary(const Vector& x, double eps) const;

 private:
  int dim_ = 0;
  std::vector<Box> boxes_;
};

/// A set, the lattice it is meant to tile, and the expected tiling level.
class MultiTileConfig {
 public:
  MultiTileConfig(BoxUnion set, Lattice lattice, int level);

  const BoxUnion& set() const { return set_; }
  const Lattice& lattice() const { return lattice_; }
  int level() const { return level_; }

  /// Lattice points that can satisfy omega + lambda in the set for some
  /// omega in the fundamental domain, in lexicographic order.
  const std::vector<Vector>& translates() const { return translates_; }

  /// measure(set) == level * covolume to relative 1e-9; necessary for a
  /// k-tiling.
  bool measure_consistent(double rel_tol = 1e-9) const;

 private:
  BoxUnion set_;
  Lattice lattice_;
  int level_;
  std::vector<Vector> translates_;
};

/// Offset sample grid of the fundamental domain: basis images of
/// ((j + 1/2)/n - 1/2) per axis, axis 0 varying slowest.
class FiberSampleGrid {
 public:
  FiberSampleGrid(const Lattice& lattice, int per_axis);

  int per_axis() const { return per_axis_; }
  int dim() const { return static_cast<int>(lattice_.dim()); }
  std::size_t size() const { return points_.size(); }
  const Lattice& lattice() const { return lattice_; }
  const Vector& point(std::size_t i) const { return points_[i]; }
  /// Coordinates of point i in the basis, each in (-1/2, 1/2).
  const Vector& unit_coords(std::size_t i) const { return unit_coords_[i]; }
  const std::vector<Vector>& points() const { return points_; }

  /// Measure of the fundamental domain carried by each sample.
  double cell_weight() const;

  /// Index of the grid point equal to x within tol, if any.
  std::optional<std::size_t> locate(const Vector& x, double tol = 1e-9) const;

 private:
  Lattice lattice_;
  int per_axis_;
  std::vector<Vector> points_;
  std::vector<Vector> unit_coords_;
};

/// Grid for `cfg`, rejected with BoundaryCollision when some sample lands on
/// a box boundary modulo the lattice.
FiberSampleGrid make_grid(const MultiTileConfig& cfg, int per_axis);

/// Lattice points of a lambda-vector in lexicographic order.
struct LambdaVector {
  std::vector<Vector> entries;

  std::size_t size() const { return entries.size(); }
  const Vector& operator[](std::size_t j) const { return entries[j]; }
};

bool operator<(const LambdaVector& a, const LambdaVector& b);
bool operator==(const LambdaVector& a, const LambdaVector& b);

/// Distinct lambda-vectors with the number of grid samples mapped to each.
class LambdaSet {
 public:
  struct Entry {
    std::size_t count = 0;
    double weight = 0.0;
  };

  LambdaSet() = default;

  /// Each vector given weight 1/size (a synthetic set).
  static LambdaSet uniform(const std::vector<LambdaVector>& vectors);

  void add(const LambdaVector& v, std::size_t count = 1);

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  std::size_t total() const { return total_; }
  /// Common length k of the vectors, 0 when empty.
  std::size_t level() const;

  const std::map<LambdaVector, Entry>& items() const { return items_; }
  double weight(const LambdaVector& v) const;
  double weight_sum() const;
  std::vector<LambdaVector> vectors() const;

 private:
  std::map<LambdaVector, Entry> items_;
  std::size_t total_ = 0;
};

std::size_t tiling_level_at(const MultiTileConfig& cfg, const Vector& omega);

struct TilingViolation {
  std::size_t index;
  Vector omega;
  std::size_t count;
};

struct TilingReport {
  bool ok = true;
  std::vector<TilingViolation> violations;
};

TilingReport verify_k_tiling(const MultiTileConfig& cfg, const FiberSampleGrid& grid);

/// Throws WrongMultiplicity when omega does not see exactly level() translates.
LambdaVector lambda_vector(const MultiTileConfig& cfg, const Vector& omega);

/// lambda-vector of every grid sample, in grid order.
std::vector<LambdaVector> lambda_map(const MultiTileConfig& cfg, const FiberSampleGrid& grid);

LambdaSet enumerate_lambda_set(const MultiTileConfig& cfg, const FiberSampleGrid& grid);

/// Piece j of the splitting of a k-tile into 1-tiles: sample omega is sent to
/// omega + translate[omega].
struct OneTilePiece {
  std::vector<Vector> translate;
  /// Exact box form, available when the fundamental domain is an axis-aligned box.
  std::optional<BoxUnion> boxes;
};

std::vector<OneTilePiece> decompose_into_one_tiles(const MultiTileConfig& cfg,
                                                   const FiberSampleGrid& grid);

/// Checks on the grid that the sampled piece meets every lattice coset once:
/// for each sample, counts the lattice translates x = omega + lambda that
/// reduce to a sample whose assigned point is x.
TilingReport verify_piece_one_tiling(const OneTilePiece& piece, const MultiTileConfig& cfg,
                                     const FiberSampleGrid& grid);

}  // namespace fiberkit
