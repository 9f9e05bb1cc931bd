#include "fiberkit/shift_ops.hpp"

#include "fiberkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fiberkit {
namespace {

bool re_im_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

struct EigenPick {
  Complex value;
  CVector vector;  // unit, in the coordinates of the matrix
};

// Smallest eigenvalue in (Re, Im) order and a unit vector of the kernel of
// c - value.
EigenPick pick_eigen(const CMatrix& c, std::size_t sample) {
  const Eigen::Index p = c.rows();
  if (p == 1) return {c(0, 0), CVector::Ones(1)};
  Eigen::ComplexEigenSolver<CMatrix> solver(c, false);
  if (solver.info() != Eigen::Success) {
    throw EigenFailure("eigensolver did not converge at grid sample " + std::to_string(sample));
  }
  const CVector& values = solver.eigenvalues();
  Complex best = values(0);
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (re_im_less(values(i), best)) best = values(i);
  }
  const CMatrix shifted = c - best * CMatrix::Identity(p, p);
  Eigen::JacobiSVD<CMatrix> svd(shifted, Eigen::ComputeFullV);
  CVector v = svd.matrixV().col(p - 1);
  v.normalize();
  return {best, v};
}

CMatrix complement_of(const CVector& u) {
  const Eigen::Index p = u.size();
  Eigen::HouseholderQR<CMatrix> qr(u);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(p, p);
  return q.rightCols(p - 1);
}

// Rotates window-coordinate fiber and its range coordinates by the same phase.
void phase_fix(CVector& window_vec, CVector& coords) {
  CVector before = window_vec;
  normalize_phase(window_vec);
  for (Eigen::Index i = 0; i < before.size(); ++i) {
    if (std::abs(before[i]) > 0.0) {
      coords *= window_vec[i] / before[i];
      return;
    }
  }
}

RangeOperatorField scalar_field(const RangeField& x, const std::vector<Complex>& scalars) {
  RangeOperatorField r{x, std::vector<CMatrix>(x.bases.size())};
  for (std::size_t i = 0; i < x.bases.size(); ++i) {
    const auto m = static_cast<Eigen::Index>(x.dim_at(i));
    r.mats[i] = scalars[i] * CMatrix::Identity(m, m);
  }
  return r;
}

struct Triangular {
  CMatrix q;
  std::vector<Complex> selected;
};

Triangular triangularize_matrix(const CMatrix& r, std::size_t sample) {
  const Eigen::Index m = r.rows();
  Triangular out{CMatrix(m, m), {}};
  CMatrix w = CMatrix::Identity(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const CMatrix compressed = w.adjoint() * r * w;
    const EigenPick pick = pick_eigen(compressed, sample);
    out.q.col(j) = w * pick.vector;
    out.selected.push_back(pick.value);
    if (j + 1 < m) w = w * complement_of(pick.vector);
  }
  return out;
}

}  // namespace

void RangeOperatorField::validate() const {
  if (mats.size() != range.bases.size()) {
    throw DimensionMismatch("operator field and range field sample counts differ");
  }
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const auto m = static_cast<Eigen::Index>(range.dim_at(i));
    if (mats[i].rows() != m || mats[i].cols() != m) {
      throw DimensionMismatch("operator matrix at grid sample " + std::to_string(i) +
                              " does not match the fiber dimension " + std::to_string(m));
    }
  }
}

CMatrix RangeOperatorField::window_matrix(std::size_t i) const {
  return range.bases[i] * mats[i] * range.bases[i].adjoint();
}

double op_norm(const RangeOperatorField& r) {
  double best = 0.0;
  for (const CMatrix& m : r.mats) best = std::max(best, spectral_norm(m));
  return best;
}

AdjointReport adjoint_and_normality(const RangeOperatorField& r) {
  r.validate();
  AdjointReport out;
  out.adjoint = RangeOperatorField{r.range, std::vector<CMatrix>(r.mats.size())};
  std::vector<double> commutators(r.mats.size(), 0.0);
  parallel_for(r.mats.size(), [&](std::size_t i) {
    const CMatrix& m = r.mats[i];
    out.adjoint.mats[i] = m.adjoint();
    commutators[i] = spectral_norm(m * m.adjoint() - m.adjoint() * m);
  });
  for (double c : commutators) out.max_commutator = std::max(out.max_commutator, c);
  const double norm = op_norm(r);
  out.tolerance = 1e-8 * (1.0 + norm * norm);
  out.normal = out.max_commutator <= out.tolerance;
  return out;
}

KernelImage kernel_image_fields(const RangeOperatorField& r, double rank_tol) {
  r.validate();
  const auto w = static_cast<Eigen::Index>(r.range.window->size());
  KernelImage out{{r.range.grid, r.range.window, std::vector<CMatrix>(r.mats.size())},
                  {r.range.grid, r.range.window, std::vector<CMatrix>(r.mats.size())}};
  parallel_for(r.mats.size(), [&](std::size_t i) {
    const CMatrix& m = r.mats[i];
    const CMatrix& basis = r.range.bases[i];
    const Eigen::Index dim = m.rows();
    if (dim == 0) {
      out.kernel.bases[i] = CMatrix(w, 0);
      out.image.bases[i] = CMatrix(w, 0);
      return;
    }
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    if (s(0) > 0.0) {
      while (rank < s.size() && s(rank) > rank_tol * s(0)) ++rank;
    }
    out.kernel.bases[i] = basis * svd.matrixV().rightCols(dim - rank);
    out.image.bases[i] = basis * svd.matrixU().leftCols(rank);
  });
  return out;
}

EigenSelection select_eigenvalue_field(const RangeOperatorField& r) {
  r.validate();
  EigenSelection out{std::vector<Complex>(r.mats.size()),
                     FiberVectorField::zeros(r.range.grid, r.range.window)};
  parallel_for(r.mats.size(), [&](std::size_t i) {
    if (r.mats[i].rows() == 0) return;
    EigenPick pick = pick_eigen(r.mats[i], i);
    CVector fiber = r.range.bases[i] * pick.vector;
    phase_fix(fiber, pick.vector);
    out.lambda[i] = pick.value;
    out.eigvec.vectors[i] = std::move(fiber);
  });
  return out;
}

TriangularDecomposition triangularize(const RangeOperatorField& r) {
  r.validate();
  const std::size_t n = r.mats.size();
  const std::size_t ell = length(r.range);
  TriangularDecomposition out;
  out.generators.assign(ell, FiberVectorField::zeros(r.range.grid, r.range.window));
  out.nested_dims.resize(n);
  out.tri_mats.resize(n);
  out.change_of_basis.resize(n);
  out.selected.resize(n);

  parallel_for(n, [&](std::size_t i) {
    const CMatrix& basis = r.range.bases[i];
    const Eigen::Index m = r.mats[i].rows();
    Triangular t = triangularize_matrix(r.mats[i], i);
    for (Eigen::Index j = 0; j < m; ++j) {
      CVector fiber = basis * t.q.col(j);
      CVector coords = t.q.col(j);
      phase_fix(fiber, coords);
      t.q.col(j) = coords;
      out.generators[static_cast<std::size_t>(j)].vectors[i] = std::move(fiber);
    }
    auto& dims = out.nested_dims[i];
    for (std::size_t j = 1; j <= ell; ++j) dims.push_back(std::min(j, static_cast<std::size_t>(m)));
    out.tri_mats[i] = t.q.adjoint() * r.mats[i] * t.q;
    out.change_of_basis[i] = std::move(t.q);
    out.selected[i] = std::move(t.selected);
  });
  return out;
}

TriangularResiduals check_triangular(const RangeOperatorField& r,
                                     const TriangularDecomposition& t) {
  TriangularResiduals res;
  for (std::size_t i = 0; i < r.mats.size(); ++i) {
    const CMatrix& tri = t.tri_mats[i];
    const CMatrix& q = t.change_of_basis[i];
    const Eigen::Index m = tri.rows();
    for (Eigen::Index row = 0; row < m; ++row) {
      for (Eigen::Index col = 0; col < row; ++col) {
        res.strict_lower = std::max(res.strict_lower, std::abs(tri(row, col)));
      }
      res.diagonal = std::max(res.diagonal,
                              std::abs(tri(row, row) - t.selected[i][static_cast<std::size_t>(row)]));
    }
    if (m == 0) continue;
    res.unitary = std::max(
        res.unitary, (q.adjoint() * q - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff());
    const CMatrix identity = CMatrix::Identity(m, m);
    for (Eigen::Index j = 1; j <= m; ++j) {
      const CMatrix p = q.leftCols(j) * q.leftCols(j).adjoint();
      res.invariance = std::max(res.invariance, spectral_norm((identity - p) * r.mats[i] * p));
    }
  }
  for (std::size_t j = 0; j + 1 < t.generators.size(); ++j) {
    const auto& outer = t.generators[j].vectors;
    const auto& inner = t.generators[j + 1].vectors;
    for (std::size_t i = 0; i < outer.size(); ++i) {
      if (inner[i].norm() > 1e-12 && !(outer[i].norm() > 1e-12)) res.nested_spectra = false;
    }
  }
  return res;
}

DiagonalDecomposition diagonalize_normal(const RangeOperatorField& r) {
  const AdjointReport adj = adjoint_and_normality(r);
  if (!adj.normal) throw NotNormal(adj.max_commutator);

  const TriangularDecomposition t = triangularize(r);
  const std::size_t n = r.mats.size();
  const std::size_t ell = t.generators.size();
  DiagonalDecomposition out;
  out.max_commutator = adj.max_commutator;
  out.generators.assign(ell, FiberVectorField::zeros(r.range.grid, r.range.window));
  out.eigenvalues.assign(ell, std::vector<Complex>(n, Complex(0.0, 0.0)));
  out.change_of_basis.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const CMatrix& q = t.change_of_basis[i];
    const Eigen::Index m = q.cols();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) order[static_cast<std::size_t>(j)] = j;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return re_im_less(t.tri_mats[i](a, a), t.tri_mats[i](b, b));
    });
    CMatrix sorted(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::Index src = order[static_cast<std::size_t>(j)];
      const auto slot = static_cast<std::size_t>(j);
      sorted.col(j) = q.col(src);
      out.eigenvalues[slot][i] = t.tri_mats[i](src, src);
      out.generators[slot].vectors[i] = t.generators[static_cast<std::size_t>(src)].vectors[i];
    }
    out.change_of_basis[i] = std::move(sorted);
  }
  return out;
}

double reconstruction_residual(const RangeOperatorField& r, const DiagonalDecomposition& d) {
  double worst = 0.0;
  for (std::size_t i = 0; i < r.mats.size(); ++i) {
    const CMatrix& q = d.change_of_basis[i];
    const Eigen::Index m = q.cols();
    if (m == 0) continue;
    CVector values(m);
    for (Eigen::Index j = 0; j < m; ++j) values(j) = d.eigenvalues[static_cast<std::size_t>(j)][i];
    const CMatrix rebuilt = q * values.asDiagonal() * q.adjoint();
    worst = std::max(worst, spectral_norm(r.mats[i] - rebuilt));
  }
  return worst;
}

double reducing_residual(const RangeOperatorField& r, const DiagonalDecomposition& d) {
  double worst = 0.0;
  for (std::size_t i = 0; i < r.mats.size(); ++i) {
    const CMatrix& q = d.change_of_basis[i];
    const Eigen::Index m = q.cols();
    const CMatrix identity = CMatrix::Identity(m, m);
    for (Eigen::Index j = 1; j <= m; ++j) {
      const CMatrix p = q.leftCols(j) * q.leftCols(j).adjoint();
      worst = std::max(worst, spectral_norm(p * r.mats[i] * (identity - p)));
      worst = std::max(worst, spectral_norm((identity - p) * r.mats[i] * p));
    }
  }
  return worst;
}

Complex multiplier_symbol(const std::vector<Tap>& taps, const Vector& omega) {
  Complex sum(0.0, 0.0);
  for (const Tap& tap : taps) sum += tap.value * unit_phase(-omega.dot(tap.h));
  return sum;
}

std::vector<Vector> h_window(const FiberSampleGrid& grid, double radius) {
  const Lattice h_lattice = dual(grid.lattice());
  const int d = grid.dim();
  const long n = grid.per_axis();
  const long lo = -(n / 2);
  const long hi = (n + 1) / 2 - 1;
  std::vector<Vector> out;
  IVector z = IVector::Constant(d, lo);
  while (true) {
    Vector h = h_lattice.point(z);
    if (!(h.norm() > radius)) out.push_back(std::move(h));
    int axis = d - 1;
    while (axis >= 0 && z[axis] == hi) z[axis--] = lo;
    if (axis < 0) break;
    ++z[axis];
  }
  std::sort(out.begin(), out.end(), LexLess{});
  return out;
}

std::vector<Complex> SEigenvalue::resynthesize(const FiberSampleGrid& grid) const {
  std::vector<Complex> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { out[i] = multiplier_symbol(coeffs, grid.point(i)); });
  return out;
}

std::vector<SEigenvalue> s_eigenvalue_extract(const DiagonalDecomposition& d,
                                              double h_window_radius) {
  std::vector<SEigenvalue> out;
  if (d.generators.empty()) return out;
  const FiberSampleGrid& grid = *d.generators.front().grid;
  const std::vector<Vector> hs = h_window(grid, h_window_radius);
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  for (const auto& track : d.eigenvalues) {
    SEigenvalue s;
    s.lambda_field = track;
    s.coeffs.resize(hs.size());
    parallel_for(hs.size(), [&](std::size_t k) {
      Complex sum(0.0, 0.0);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        sum += track[i] * unit_phase(grid.point(i).dot(hs[k]));
      }
      s.coeffs[k] = Tap{hs[k], sum * inv_n};
    });
    out.push_back(std::move(s));
  }
  return out;
}

FiberVectorField lambda_a_apply(const std::vector<Tap>& taps, const FiberVectorField& f) {
  FiberVectorField out{f.grid, f.window, std::vector<CVector>(f.vectors.size())};
  parallel_for(f.vectors.size(), [&](std::size_t i) {
    out.vectors[i] = multiplier_symbol(taps, f.grid->point(i)) * f.vectors[i];
  });
  return out;
}

FiberVectorField lambda_a_finite_sum(const std::vector<Tap>& taps, const MultiTileConfig& cfg,
                                     const Vector& a, WindowPtr window, GridPtr grid) {
  FiberVectorField out = FiberVectorField::zeros(grid, window);
  for (const Tap& tap : taps) {
    if (!cfg.lattice().in_dual(tap.h)) throw NotInDual("tap is not a dual lattice point");
    const FiberVectorField shifted = fiberize_pw_kernel(cfg, a - tap.h, window, grid);
    for (std::size_t i = 0; i < out.vectors.size(); ++i) {
      out.vectors[i] += tap.value * shifted.vectors[i];
    }
  }
  return out;
}

RangeOperatorField shift_operator_field(const Vector& h, const RangeField& x) {
  if (!x.grid->lattice().in_dual(h)) {
    throw NotInDual("shift vector is not in the dual lattice");
  }
  std::vector<Complex> scalars(x.bases.size());
  for (std::size_t i = 0; i < scalars.size(); ++i) scalars[i] = unit_phase(-x.grid->point(i).dot(h));
  return scalar_field(x, scalars);
}

RangeOperatorField multiplier_operator_field(const std::vector<Tap>& taps, const RangeField& x) {
  for (const Tap& tap : taps) {
    if (!x.grid->lattice().in_dual(tap.h)) throw NotInDual("tap is not a dual lattice point");
  }
  std::vector<Complex> scalars(x.bases.size());
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    scalars[i] = multiplier_symbol(taps, x.grid->point(i));
  }
  return scalar_field(x, scalars);
}

RangeOperatorField matrix_operator_field(const MatrixFieldSpec& spec, const RangeField& x) {
  RangeOperatorField r{x, std::vector<CMatrix>(x.bases.size())};
  for (std::size_t i = 0; i < x.bases.size(); ++i) {
    const auto m = static_cast<Eigen::Index>(x.dim_at(i));
    if (m == 0) {
      r.mats[i] = CMatrix(0, 0);
      continue;
    }
    const Vector& omega = x.grid->point(i);
    switch (spec.kind) {
      case MatrixFieldSpec::Kind::constant:
        if (spec.constant.rows() != m || spec.constant.cols() != m) {
          throw DimensionMismatch("constant matrix is " + std::to_string(spec.constant.rows()) +
                                  "x" + std::to_string(spec.constant.cols()) +
                                  " but the fiber dimension is " + std::to_string(m));
        }
        r.mats[i] = spec.constant;
        break;
      case MatrixFieldSpec::Kind::diagonal_exponentials:
        if (static_cast<Eigen::Index>(spec.h.size()) != m) {
          throw DimensionMismatch("diagonal field needs one h per fiber dimension");
        }
        r.mats[i] = CMatrix::Zero(m, m);
        for (Eigen::Index j = 0; j < m; ++j) {
          r.mats[i](j, j) = unit_phase(-omega.dot(spec.h[static_cast<std::size_t>(j)]));
        }
        break;
      case MatrixFieldSpec::Kind::nilpotent: {
        if (spec.h.empty()) throw DimensionMismatch("nilpotent field needs h");
        const Complex g = unit_phase(-omega.dot(spec.h.front()));
        r.mats[i] = CMatrix::Zero(m, m);
        for (Eigen::Index j = 0; j + 1 < m; ++j) r.mats[i](j, j + 1) = g;
        break;
      }
    }
  }
  return r;
}

}  // namespace fiberkit
