#include "fiberkit/multitile.hpp"

#include "fiberkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fiberkit {
namespace {

bool intersects(const Box& a, const Box& b) {
  for (Eigen::Index i = 0; i < a.low.size(); ++i) {
    if (std::max(a.low[i], b.low[i]) >= std::min(a.high[i], b.high[i])) return false;
  }
  return true;
}

// a \ b as disjoint boxes.
std::vector<Box> subtract(const Box& a, const Box& b) {
  if (!intersects(a, b)) return {a};
  std::vector<Box> out;
  Box rest = a;
  for (Eigen::Index i = 0; i < a.low.size(); ++i) {
    if (rest.low[i] < b.low[i]) {
      Box slab = rest;
      slab.high[i] = b.low[i];
      out.push_back(slab);
      rest.low[i] = b.low[i];
    }
    if (rest.high[i] > b.high[i]) {
      Box slab = rest;
      slab.low[i] = b.high[i];
      out.push_back(slab);
      rest.high[i] = b.high[i];
    }
  }
  return out;
}

// Boxes that agree on every axis but one and touch along it.
bool try_merge(Box& a, const Box& b) {
  const Eigen::Index d = a.low.size();
  Eigen::Index axis = -1;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (a.low[i] == b.low[i] && a.high[i] == b.high[i]) continue;
    if (axis >= 0) return false;
    axis = i;
  }
  if (axis < 0) return true;
  if (a.high[axis] == b.low[axis]) {
    a.high[axis] = b.high[axis];
    return true;
  }
  if (b.high[axis] == a.low[axis]) {
    a.low[axis] = b.low[axis];
    return true;
  }
  return false;
}

bool box_less(const Box& a, const Box& b) {
  LexLess less;
  if (less(a.low, b.low)) return true;
  if (less(b.low, a.low)) return false;
  return less(a.high, b.high);
}

std::vector<Box> normalize(const std::vector<Box>& input) {
  std::vector<Box> disjoint;
  for (const Box& box : input) {
    std::vector<Box> fragments{box};
    for (const Box& existing : disjoint) {
      std::vector<Box> next;
      for (const Box& f : fragments) {
        auto pieces = subtract(f, existing);
        next.insert(next.end(), pieces.begin(), pieces.end());
      }
      fragments = std::move(next);
      if (fragments.empty()) break;
    }
    disjoint.insert(disjoint.end(), fragments.begin(), fragments.end());
  }

  bool merged = true;
  while (merged) {
    merged = false;
    std::sort(disjoint.begin(), disjoint.end(), box_less);
    for (std::size_t i = 0; i < disjoint.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < disjoint.size(); ++j) {
        if (try_merge(disjoint[i], disjoint[j])) {
          disjoint.erase(disjoint.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
          break;
        }
      }
    }
  }
  std::sort(disjoint.begin(), disjoint.end(), box_less);
  return disjoint;
}

bool same_point(const Vector& a, const Vector& b, double tol) {
  return (a - b).lpNorm<Eigen::Infinity>() <= tol;
}

}  // namespace

bool Box::contains(const Vector& x) const {
  for (Eigen::Index i = 0; i < low.size(); ++i) {
    if (x[i] < low[i] || x[i] >= high[i]) return false;
  }
  return true;
}

double Box::volume() const { return (high - low).prod(); }

BoxUnion::BoxUnion(const std::vector<Box>& boxes) {
  if (boxes.empty()) throw InvalidSet("box list is empty; use BoxUnion(dim) for the empty set");
  dim_ = static_cast<int>(boxes.front().low.size());
  if (dim_ == 0) throw InvalidSet("boxes must have positive dimension");
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const Box& box = boxes[b];
    const std::string where = "box " + std::to_string(b);
    if (box.low.size() != dim_ || box.high.size() != dim_) {
      throw InvalidSet(where + " has inconsistent dimension");
    }
    if (!box.low.allFinite() || !box.high.allFinite()) {
      throw InvalidSet(where + " has non-finite corners");
    }
    for (int i = 0; i < dim_; ++i) {
      if (!(box.low[i] < box.high[i])) throw InvalidSet(where + " is empty");
    }
  }
  boxes_ = normalize(boxes);
}

bool BoxUnion::contains(const Vector& x) const {
  return std::any_of(boxes_.begin(), boxes_.end(), [&](const Box& b) { return b.contains(x); });
}

double BoxUnion::measure() const {
  double total = 0.0;
  for (const Box& b : boxes_) total += b.volume();
  return total;
}

double BoxUnion::circumscribed_radius() const {
  double best = 0.0;
  Vector corner(dim_);
  for (const Box& b : boxes_) {
    for (long mask = 0; mask < (1L << dim_); ++mask) {
      for (int i = 0; i < dim_; ++i) corner[i] = (mask >> i) & 1 ? b.high[i] : b.low[i];
      best = std::max(best, corner.norm());
    }
  }
  return best;
}

BoxUnion BoxUnion::translated(const Vector& shift) const {
  if (boxes_.empty()) return *this;
  std::vector<Box> moved = boxes_;
  for (Box& b : moved) {
    b.low += shift;
    b.high += shift;
  }
  return BoxUnion(moved);
}

BoxUnion BoxUnion::intersected(const BoxUnion& other) const {
  std::vector<Box> parts;
  for (const Box& a : boxes_) {
    for (const Box& b : other.boxes_) {
      if (!intersects(a, b)) continue;
      parts.push_back({a.low.cwiseMax(b.low), a.high.cwiseMin(b.high)});
    }
  }
  if (parts.empty()) return BoxUnion(dim_);
  return BoxUnion(parts);
}

bool BoxUnion::near_boundary(const Vector& x, double eps) const {
  for (const Box& b : boxes_) {
    bool in_closure = true;
    bool on_face = false;
    for (int i = 0; i < dim_; ++i) {
      if (x[i] < b.low[i] - eps || x[i] > b.high[i] + eps) {
        in_closure = false;
        break;
      }
      if (std::abs(x[i] - b.low[i]) <= eps || std::abs(x[i] - b.high[i]) <= eps) on_face = true;
    }
    if (in_closure && on_face) return true;
  }
  return false;
}

MultiTileConfig::MultiTileConfig(BoxUnion set, Lattice lattice, int level)
    : set_(std::move(set)), lattice_(std::move(lattice)), level_(level) {
  if (level_ < 1) throw InvalidSet("tiling level must be positive");
  if (set_.dim() != lattice_.dim()) {
    throw DimensionMismatch("set dimension " + std::to_string(set_.dim()) +
                            " differs from lattice dimension " + std::to_string(lattice_.dim()));
  }
  if (!set_.empty()) {
    const double radius = set_.circumscribed_radius() + lattice_.domain_radius();
    translates_ = lattice_points_in_radius(lattice_, Vector::Zero(lattice_.dim()),
                                           radius + 1e-9 * std::max(1.0, radius));
  }
}

bool MultiTileConfig::measure_consistent(double rel_tol) const {
  const double expected = level_ * lattice_.covolume();
  return std::abs(set_.measure() - expected) <= rel_tol * expected;
}

FiberSampleGrid::FiberSampleGrid(const Lattice& lattice, int per_axis)
    : lattice_(lattice), per_axis_(per_axis) {
  if (per_axis < 1) throw std::invalid_argument("grid per_axis must be positive");
  const int d = lattice.dim();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(per_axis);
  points_.reserve(total);
  unit_coords_.reserve(total);

  std::vector<int> j(d, 0);
  Vector u(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (int i = 0; i < d; ++i) {
      u[i] = static_cast<double>(2 * j[i] + 1 - per_axis) / (2.0 * per_axis);
    }
    unit_coords_.push_back(u);
    points_.push_back(lattice.basis() * u);
    for (int axis = d - 1; axis >= 0; --axis) {
      if (++j[axis] < per_axis) break;
      j[axis] = 0;
    }
  }
}

double FiberSampleGrid::cell_weight() const {
  return lattice_.covolume() / static_cast<double>(points_.size());
}

std::optional<std::size_t> FiberSampleGrid::locate(const Vector& x, double tol) const {
  const Vector u = lattice_.inverse() * x;
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double jf = std::round((u[i] + 0.5) * per_axis_ - 0.5);
    if (jf < 0 || jf >= per_axis_) return std::nullopt;
    idx = idx * static_cast<std::size_t>(per_axis_) + static_cast<std::size_t>(jf);
  }
  if (!same_point(points_[idx], x, tol)) return std::nullopt;
  return idx;
}

FiberSampleGrid make_grid(const MultiTileConfig& cfg, int per_axis) {
  FiberSampleGrid grid(cfg.lattice(), per_axis);
  const double eps = 1e-9 * std::max(1.0, cfg.set().circumscribed_radius());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (const Vector& lambda : cfg.translates()) {
      if (cfg.set().near_boundary(grid.point(i) + lambda, eps)) {
        throw BoundaryCollision("grid sample " + std::to_string(i) +
                                " lies on a set boundary modulo the lattice; choose a per_axis "
                                "coprime to the box corner denominators");
      }
    }
  }
  return grid;
}

bool operator<(const LambdaVector& a, const LambdaVector& b) {
  if (a.entries.size() != b.entries.size()) return a.entries.size() < b.entries.size();
  LexLess less;
  for (std::size_t j = 0; j < a.entries.size(); ++j) {
    if (less(a.entries[j], b.entries[j])) return true;
    if (less(b.entries[j], a.entries[j])) return false;
  }
  return false;
}

bool operator==(const LambdaVector& a, const LambdaVector& b) { return !(a < b) && !(b < a); }

LambdaSet LambdaSet::uniform(const std::vector<LambdaVector>& vectors) {
  LambdaSet s;
  for (const auto& v : vectors) s.add(v);
  return s;
}

void LambdaSet::add(const LambdaVector& v, std::size_t count) {
  if (!items_.empty() && v.size() != level()) {
    throw DimensionMismatch("lambda-vectors of a set must share their length");
  }
  items_[v].count += count;
  total_ += count;
  for (auto& [key, entry] : items_) {
    entry.weight = static_cast<double>(entry.count) / static_cast<double>(total_);
  }
}

std::size_t LambdaSet::level() const {
  return items_.empty() ? 0 : items_.begin()->first.size();
}

double LambdaSet::weight(const LambdaVector& v) const {
  auto it = items_.find(v);
  return it == items_.end() ? 0.0 : it->second.weight;
}

double LambdaSet::weight_sum() const {
  std::size_t counted = 0;
  for (const auto& [v, e] : items_) counted += e.count;
  return total_ == 0 ? 0.0 : static_cast<double>(counted) / static_cast<double>(total_);
}

std::vector<LambdaVector> LambdaSet::vectors() const {
  std::vector<LambdaVector> out;
  out.reserve(items_.size());
  for (const auto& [v, e] : items_) out.push_back(v);
  return out;
}

std::size_t tiling_level_at(const MultiTileConfig& cfg, const Vector& omega) {
  std::size_t count = 0;
  for (const Vector& lambda : cfg.translates()) {
    if (cfg.set().contains(omega + lambda)) ++count;
  }
  return count;
}

TilingReport verify_k_tiling(const MultiTileConfig& cfg, const FiberSampleGrid& grid) {
  std::vector<std::size_t> counts(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { counts[i] = tiling_level_at(cfg, grid.point(i)); });
  TilingReport report;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (counts[i] != static_cast<std::size_t>(cfg.level())) {
      report.ok = false;
      report.violations.push_back({i, grid.point(i), counts[i]});
    }
  }
  return report;
}

LambdaVector lambda_vector(const MultiTileConfig& cfg, const Vector& omega) {
  LambdaVector v;
  for (const Vector& lambda : cfg.translates()) {
    if (cfg.set().contains(omega + lambda)) v.entries.push_back(lambda);
  }
  // translates() is already lexicographic, so entries are too.
  if (v.entries.size() != static_cast<std::size_t>(cfg.level())) {
    throw WrongMultiplicity(v.entries.size(), static_cast<std::size_t>(cfg.level()));
  }
  return v;
}

std::vector<LambdaVector> lambda_map(const MultiTileConfig& cfg, const FiberSampleGrid& grid) {
  std::vector<LambdaVector> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { out[i] = lambda_vector(cfg, grid.point(i)); });
  return out;
}

LambdaSet enumerate_lambda_set(const MultiTileConfig& cfg, const FiberSampleGrid& grid) {
  LambdaSet set;
  for (const LambdaVector& v : lambda_map(cfg, grid)) set.add(v);
  return set;
}

std::vector<OneTilePiece> decompose_into_one_tiles(const MultiTileConfig& cfg,
                                                   const FiberSampleGrid& grid) {
  const auto map = lambda_map(cfg, grid);
  const auto k = static_cast<std::size_t>(cfg.level());
  std::vector<OneTilePiece> pieces(k);
  for (std::size_t j = 0; j < k; ++j) {
    pieces[j].translate.reserve(map.size());
    for (const auto& v : map) pieces[j].translate.push_back(v[j]);
  }

  // Exact boxes need an axis-aligned fundamental domain. The set of samples
  // with lambda-vector v is, up to a null set, I intersected with every
  // Omega - v_i.
  const Matrix& basis = cfg.lattice().basis();
  const Matrix diag = basis.diagonal().asDiagonal();
  if (basis != diag || (basis.diagonal().array() <= 0.0).any()) return pieces;
  const double combos = std::pow(static_cast<double>(cfg.set().boxes().size()),
                                 static_cast<double>(k));
  if (combos > 1e5) return pieces;

  const Vector half = 0.5 * basis.diagonal();
  const BoxUnion domain(std::vector<Box>{{-half, half}});
  LambdaSet distinct;
  for (const auto& v : map) distinct.add(v);

  for (std::size_t j = 0; j < k; ++j) {
    std::vector<Box> parts;
    for (const auto& [v, entry] : distinct.items()) {
      BoxUnion cell = domain;
      for (std::size_t i = 0; i < k && !cell.empty(); ++i) {
        cell = cell.intersected(cfg.set().translated(-v[i]));
      }
      if (cell.empty()) continue;
      const BoxUnion shifted = cell.translated(v[j]);
      parts.insert(parts.end(), shifted.boxes().begin(), shifted.boxes().end());
    }
    pieces[j].boxes = parts.empty() ? BoxUnion(cfg.lattice().dim()) : BoxUnion(parts);
  }
  return pieces;
}

TilingReport verify_piece_one_tiling(const OneTilePiece& piece, const MultiTileConfig& cfg,
                                     const FiberSampleGrid& grid) {
  if (piece.translate.size() != grid.size()) {
    throw DimensionMismatch("piece assignment does not match the grid size");
  }
  const Lattice& lattice = cfg.lattice();
  std::vector<std::size_t> counts(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    std::size_t count = 0;
    for (const Vector& lambda : cfg.translates()) {
      const Vector x = grid.point(i) + lambda;
      const Reduction r = reduce_to_fundamental(x, lattice);
      const auto sample = grid.locate(r.residue);
      if (!sample) continue;
      if (same_point(grid.point(*sample) + piece.translate[*sample], x, 1e-9)) ++count;
    }
    counts[i] = count;
  });
  TilingReport report;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (counts[i] != 1) {
      report.ok = false;
      report.violations.push_back({i, grid.point(i), counts[i]});
    }
  }
  return report;
}

}  // namespace fiberkit
