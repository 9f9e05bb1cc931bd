#include "fiberkit/fiber_model.hpp"

#include "fiberkit/parallel.hpp"

#include <algorithm>
#include <string>

namespace fiberkit {
namespace {

std::vector<long> key_of(const IVector& z) { return {z.data(), z.data() + z.size()}; }

void require_shared(const RangeField& x, const RangeField& y) {
  if (x.grid != y.grid || x.window != y.window) {
    throw DimensionMismatch("range fields must share grid and window");
  }
}

CMatrix orthonormal_span(const CMatrix& columns, double rank_tol) {
  const Eigen::Index w = columns.rows();
  if (columns.cols() == 0) return CMatrix(w, 0);
  Eigen::JacobiSVD<CMatrix> svd(columns, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    while (rank < s.size() && s(rank) > rank_tol * s(0)) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

CMatrix complement_of(const CMatrix& basis) {
  const Eigen::Index w = basis.rows();
  const Eigen::Index m = basis.cols();
  if (m == 0) return CMatrix::Identity(w, w);
  Eigen::HouseholderQR<CMatrix> qr(basis);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(w, w);
  return q.rightCols(w - m);
}

}  // namespace

LatticeWindow::LatticeWindow(const Lattice& lattice, std::vector<Vector> indices)
    : lattice_(lattice), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end(), LexLess{});
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i].size() != lattice.dim()) throw DimensionMismatch("window point dimension");
    const IVector z = lattice_.nearest_coords(indices_[i]);
    if ((lattice_.point(z) - indices_[i]).norm() > 1e-9) {
      throw InvalidLattice("window entry is not a lattice point");
    }
    if (!lookup_.emplace(key_of(z), i).second) {
      throw InvalidLattice("window entries must be distinct");
    }
  }
}

LatticeWindow LatticeWindow::within_radius(const Lattice& lattice, double radius) {
  return LatticeWindow(lattice,
                       lattice_points_in_radius(lattice, Vector::Zero(lattice.dim()), radius));
}

LatticeWindow LatticeWindow::covering(const MultiTileConfig& cfg) {
  return LatticeWindow(cfg.lattice(), cfg.translates());
}

std::optional<std::size_t> LatticeWindow::find(const Vector& lambda) const {
  const IVector z = lattice_.nearest_coords(lambda);
  if ((lattice_.point(z) - lambda).norm() > 1e-9) return std::nullopt;
  auto it = lookup_.find(key_of(z));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

FiberVectorField FiberVectorField::zeros(GridPtr grid, WindowPtr window) {
  FiberVectorField f{grid, window, {}};
  f.vectors.assign(grid->size(), CVector::Zero(static_cast<Eigen::Index>(window->size())));
  return f;
}

bool FiberVectorField::unit_norm_on_support(double tol) const {
  for (const CVector& v : vectors) {
    const double n = v.norm();
    if (n > 1e-12 && std::abs(n - 1.0) > tol) return false;
  }
  return true;
}

std::vector<std::size_t> FiberVectorField::support(double tol) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].norm() > tol) out.push_back(i);
  }
  return out;
}

CMatrix RangeField::projector(std::size_t i) const { return bases[i] * bases[i].adjoint(); }

double RangeField::orthonormality_error() const {
  double worst = 0.0;
  for (const CMatrix& b : bases) {
    if (b.cols() == 0) continue;
    const CMatrix gram = b.adjoint() * b;
    worst = std::max(worst, (gram - CMatrix::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff());
  }
  return worst;
}

FiberVectorField fiberize_pw_kernel(const MultiTileConfig& cfg, const Vector& a, WindowPtr window,
                                    GridPtr grid) {
  if (a.size() != cfg.lattice().dim()) throw DimensionMismatch("kernel frequency dimension");
  FiberVectorField f = FiberVectorField::zeros(grid, window);
  parallel_for(grid->size(), [&](std::size_t i) {
    const Vector& omega = grid->point(i);
    for (const Vector& lambda : cfg.translates()) {
      const Vector x = omega + lambda;
      if (!cfg.set().contains(x)) continue;
      const auto slot = window->find(lambda);
      if (!slot) {
        throw WindowTooSmall("translate needed at grid sample " + std::to_string(i) +
                             " is outside the lattice window");
      }
      f.vectors[i][static_cast<Eigen::Index>(*slot)] = unit_phase(a.dot(x));
    }
  });
  return f;
}

RangeField paley_wiener_range(const MultiTileConfig& cfg, WindowPtr window, GridPtr grid) {
  RangeField r{grid, window, std::vector<CMatrix>(grid->size())};
  const auto w = static_cast<Eigen::Index>(window->size());
  parallel_for(grid->size(), [&](std::size_t i) {
    std::vector<std::size_t> slots;
    for (const Vector& lambda : cfg.translates()) {
      if (!cfg.set().contains(grid->point(i) + lambda)) continue;
      const auto slot = window->find(lambda);
      if (!slot) {
        throw WindowTooSmall("translate needed at grid sample " + std::to_string(i) +
                             " is outside the lattice window");
      }
      slots.push_back(*slot);
    }
    CMatrix basis = CMatrix::Zero(w, static_cast<Eigen::Index>(slots.size()));
    for (std::size_t c = 0; c < slots.size(); ++c) {
      basis(static_cast<Eigen::Index>(slots[c]), static_cast<Eigen::Index>(c)) = 1.0;
    }
    r.bases[i] = std::move(basis);
  });
  return r;
}

RangeField range_field_from_generators(const std::vector<FiberVectorField>& fields,
                                       const FiberTolerances& tol) {
  if (fields.empty()) throw std::invalid_argument("at least one generator field is required");
  const auto& first = fields.front();
  for (const auto& f : fields) {
    if (f.grid != first.grid || f.window != first.window) {
      throw DimensionMismatch("generator fields must share grid and window");
    }
  }
  RangeField r{first.grid, first.window, std::vector<CMatrix>(first.grid->size())};
  const auto w = static_cast<Eigen::Index>(first.window->size());
  parallel_for(first.grid->size(), [&](std::size_t i) {
    CMatrix columns(w, static_cast<Eigen::Index>(fields.size()));
    for (std::size_t g = 0; g < fields.size(); ++g) {
      columns.col(static_cast<Eigen::Index>(g)) = fields[g].vectors[i];
    }
    r.bases[i] = orthonormal_span(columns, tol.rank);
  });
  return r;
}

RangeField fiber_subspace_combine(CombineMode mode, const RangeField& x, const RangeField* y,
                                  const FiberTolerances& tol) {
  if (mode != CombineMode::complement) {
    if (y == nullptr) throw std::invalid_argument("intersect and direct_sum need two fields");
    require_shared(x, *y);
  }
  RangeField out{x.grid, x.window, std::vector<CMatrix>(x.bases.size())};
  const auto w = static_cast<Eigen::Index>(x.window->size());
  parallel_for(x.bases.size(), [&](std::size_t i) {
    const CMatrix& bx = x.bases[i];
    switch (mode) {
      case CombineMode::complement:
        out.bases[i] = complement_of(bx);
        break;
      case CombineMode::intersect: {
        const CMatrix& by = y->bases[i];
        if (bx.cols() == 0 || by.cols() == 0) {
          out.bases[i] = CMatrix(w, 0);
          break;
        }
        // Principal vectors with cosine ~1 span the intersection.
        Eigen::JacobiSVD<CMatrix> svd(bx.adjoint() * by, Eigen::ComputeThinU);
        const auto& cosines = svd.singularValues();
        Eigen::Index shared = 0;
        while (shared < cosines.size() && cosines(shared) >= 1.0 - tol.intersection) ++shared;
        out.bases[i] = bx * svd.matrixU().leftCols(shared);
        break;
      }
      case CombineMode::direct_sum: {
        const CMatrix& by = y->bases[i];
        if (bx.cols() > 0 && by.cols() > 0) {
          const double overlap = spectral_norm(bx.adjoint() * by);
          if (overlap > tol.orthogonality) {
            throw NonOrthogonal("fibers at grid sample " + std::to_string(i) +
                                " are not orthogonal (overlap " + std::to_string(overlap) + ")");
          }
        }
        CMatrix both(w, bx.cols() + by.cols());
        both << bx, by;
        out.bases[i] = std::move(both);
        break;
      }
    }
  });
  return out;
}

std::size_t length(const RangeField& x) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < x.bases.size(); ++i) best = std::max(best, x.dim_at(i));
  return best;
}

std::map<std::size_t, std::vector<std::size_t>> dimension_strata(const RangeField& x) {
  std::map<std::size_t, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < x.bases.size(); ++i) strata[x.dim_at(i)].push_back(i);
  return strata;
}

SpectrumMask spectrum(const RangeField& x) {
  SpectrumMask mask{x.grid, std::vector<bool>(x.bases.size())};
  for (std::size_t i = 0; i < x.bases.size(); ++i) mask.flags[i] = x.dim_at(i) > 0;
  return mask;
}

FiberVectorField generator_with_full_spectrum(const RangeField& x) {
  FiberVectorField f = FiberVectorField::zeros(x.grid, x.window);
  for (std::size_t i = 0; i < x.bases.size(); ++i) {
    if (x.dim_at(i) == 0) continue;
    CVector v = x.bases[i].col(0);
    v.normalize();
    normalize_phase(v);
    f.vectors[i] = std::move(v);
  }
  return f;
}

double integrated_energy(const FiberVectorField& f) {
  double total = 0.0;
  for (const CVector& v : f.vectors) total += v.squaredNorm();
  return total * f.grid->cell_weight();
}

double max_projector_distance(const RangeField& a, const RangeField& b) {
  require_shared(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.bases.size(); ++i) {
    worst = std::max(worst, spectral_norm(a.projector(i) - b.projector(i)));
  }
  return worst;
}

}  // namespace fiberkit
