#pragma once

#include "fiberkit/config.hpp"
#include "fiberkit/exponential_bases.hpp"
#include "fiberkit/fiber_model.hpp"
#include "fiberkit/lattice.hpp"
#include "fiberkit/multitile.hpp"
#include "fiberkit/shift_ops.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace testing {

using namespace fiberkit;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double x : row) m(r, c++) = x;
    ++r;
  }
  return m;
}

/// Union of intervals on the real line.
inline BoxUnion intervals(std::vector<std::pair<double, double>> parts) {
  std::vector<Box> boxes;
  for (const auto& [lo, hi] : parts) boxes.push_back({vec({lo}), vec({hi})});
  return BoxUnion(boxes);
}

inline MultiTileConfig tile_1d(std::vector<std::pair<double, double>> parts, int level) {
  return MultiTileConfig(intervals(std::move(parts)), Lattice::identity(1), level);
}

inline GridPtr grid_of(const MultiTileConfig& cfg, int n) {
  return std::make_shared<const FiberSampleGrid>(make_grid(cfg, n));
}

inline WindowPtr window_of(const MultiTileConfig& cfg) {
  return std::make_shared<const LatticeWindow>(LatticeWindow::covering(cfg));
}

/// Integers m in [-50, 50] with omega + m inside the interval union, ascending.
inline std::vector<long> brute_translates(const std::vector<std::pair<double, double>>& parts,
                                          double omega) {
  std::vector<long> out;
  for (long m = -50; m <= 50; ++m) {
    const double x = omega + static_cast<double>(m);
    for (const auto& [lo, hi] : parts) {
      if (lo <= x && x < hi) {
        out.push_back(m);
        break;
      }
    }
  }
  return out;
}

inline LambdaVector lv(std::initializer_list<double> entries) {
  LambdaVector v;
  for (double x : entries) v.entries.push_back(vec({x}));
  return v;
}

inline FrequencyVector freqs_1d(std::initializer_list<double> xs) {
  FrequencyVector f;
  for (double x : xs) f.entries.push_back(vec({x}));
  return f;
}

inline Complex cis(double turns) {
  return std::polar(1.0, 2.0 * std::numbers::pi * turns);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen_); }
  Complex cnormal() { return {normal(), normal()}; }
  CMatrix gaussian(Eigen::Index rows, Eigen::Index cols) {
    CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = cnormal();
    return m;
  }
  CMatrix unitary(Eigen::Index n) {
    Eigen::HouseholderQR<CMatrix> qr(gaussian(n, n));
    return qr.householderQ() * CMatrix::Identity(n, n);
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Field of full coordinate fibers: the identity basis of size `ell` at every
/// sample of a unit-lattice grid with n points.
inline RangeField coordinate_range(int n, std::size_t ell) {
  auto grid = std::make_shared<const FiberSampleGrid>(Lattice::identity(1), n);
  std::vector<Vector> idx;
  for (std::size_t j = 0; j < ell; ++j) idx.push_back(vec({static_cast<double>(j)}));
  auto window = std::make_shared<const LatticeWindow>(Lattice::identity(1), idx);
  RangeField r{grid, window, {}};
  const auto m = static_cast<Eigen::Index>(ell);
  r.bases.assign(grid->size(), CMatrix::Identity(m, m));
  return r;
}

/// Projector onto the column span of m, computed from a rank-revealing SVD.
inline CMatrix span_projector(const CMatrix& m, double tol = 1e-9) {
  if (m.cols() == 0) return CMatrix::Zero(m.rows(), m.rows());
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < svd.singularValues().size() && svd.singularValues()(rank) > tol * top) ++rank;
  const CMatrix u = svd.matrixU().leftCols(rank);
  return u * u.adjoint();
}

}  // namespace testing
