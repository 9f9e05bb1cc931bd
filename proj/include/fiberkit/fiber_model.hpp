#pragma once

#include "fiberkit/core.hpp"
#include "fiberkit/lattice.hpp"
#include "fiberkit/multitile.hpp"

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace fiberkit {

/// Retained coordinates of l^2(Lambda): distinct lattice points in
/// lexicographic order.
class LatticeWindow {
 public:
  LatticeWindow(const Lattice& lattice, std::vector<Vector> indices);

  /// Lattice points within `radius` of the origin.
  static LatticeWindow within_radius(const Lattice& lattice, double radius);
  /// Every translate that can meet the set of `cfg`.
  static LatticeWindow covering(const MultiTileConfig& cfg);

  std::size_t size() const { return indices_.size(); }
  const Vector& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<Vector>& indices() const { return indices_; }
  std::optional<std::size_t> find(const Vector& lambda) const;

 private:
  Lattice lattice_;
  std::vector<Vector> indices_;
  std::map<std::vector<long>, std::size_t> lookup_;
};

using GridPtr = std::shared_ptr<const FiberSampleGrid>;
using WindowPtr = std::shared_ptr<const LatticeWindow>;

/// A fiber (complex vector over the window) at every grid sample.
struct FiberVectorField {
  GridPtr grid;
  WindowPtr window;
  std::vector<CVector> vectors;

  /// Zero vectors at every sample.
  static FiberVectorField zeros(GridPtr grid, WindowPtr window);
  /// ||vector(omega)|| = 1 wherever the vector is nonzero.
  bool unit_norm_on_support(double tol = 1e-10) const;
  /// Indices where the fiber is nonzero.
  std::vector<std::size_t> support(double tol = 1e-12) const;
};

/// Orthonormal basis (window x m(omega)) of the fiber space at every sample.
struct RangeField {
  GridPtr grid;
  WindowPtr window;
  std::vector<CMatrix> bases;

  std::size_t dim_at(std::size_t i) const { return static_cast<std::size_t>(bases[i].cols()); }
  CMatrix projector(std::size_t i) const;
  /// Largest deviation of B*B from the identity over the grid.
  double orthonormality_error() const;
};

/// Grid samples with nonzero fiber space.
struct SpectrumMask {
  GridPtr grid;
  std::vector<bool> flags;
};

enum class CombineMode { complement, intersect, direct_sum };

struct FiberTolerances {
  double rank = 1e-9;            ///< relative singular value cutoff
  double intersection = 1e-9;    ///< principal-angle cosines >= 1 - this count as shared
  double orthogonality = 1e-9;   ///< direct sums need ||X* Y|| below this
};

/// Fibers of the kernel with transform e^{2 pi i a.xi} on the set:
/// vector(omega)[lambda] = e^{2 pi i a.(omega + lambda)} if omega + lambda in
/// the set, else 0. Throws WindowTooSmall if a needed translate is missing.
FiberVectorField fiberize_pw_kernel(const MultiTileConfig& cfg, const Vector& a, WindowPtr window,
                                    GridPtr grid);

/// Fiber spaces of the Paley-Wiener space of the set: coordinate vectors at
/// the translates with omega + lambda in the set.
RangeField paley_wiener_range(const MultiTileConfig& cfg, WindowPtr window, GridPtr grid);

/// Per sample, an orthonormal basis of the span of the generator fibers.
RangeField range_field_from_generators(const std::vector<FiberVectorField>& fields,
                                       const FiberTolerances& tol = {});

/// Complement within the window, intersection, or orthogonal direct sum.
/// Throws NonOrthogonal when a direct sum meets non-orthogonal fibers.
RangeField fiber_subspace_combine(CombineMode mode, const RangeField& x,
                                  const RangeField* y = nullptr, const FiberTolerances& tol = {});

/// max over the grid of m(omega).
std::size_t length(const RangeField& x);

/// Grid indices grouped by fiber dimension.
std::map<std::size_t, std::vector<std::size_t>> dimension_strata(const RangeField& x);

SpectrumMask spectrum(const RangeField& x);

/// Unit fiber in J(omega) on the spectrum (first basis column with its first
/// nonzero coordinate made real positive), zero elsewhere.
FiberVectorField generator_with_full_spectrum(const RangeField& x);

/// sum over samples of ||fiber||^2 * cell weight.
double integrated_energy(const FiberVectorField& f);

/// Largest per-sample spectral norm of P_a - P_b.
double max_projector_distance(const RangeField& a, const RangeField& b);

}  // namespace fiberkit
