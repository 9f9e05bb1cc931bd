#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fiberkit {

using Real = double;
using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using IVector = Eigen::Matrix<long, Eigen::Dynamic, 1>;

/// Base class of every error raised by the library. `kind()` is a stable
/// machine-readable tag used in structured reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class InvalidLattice : public Error {
 public:
  explicit InvalidLattice(const std::string& what) : Error("invalid-lattice", what) {}
};

class InvalidSet : public Error {
 public:
  explicit InvalidSet(const std::string& what) : Error("invalid-set", what) {}
};

class BoundaryCollision : public Error {
 public:
  explicit BoundaryCollision(const std::string& what) : Error("boundary-collision", what) {}
};

class WrongMultiplicity : public Error {
 public:
  WrongMultiplicity(std::size_t observed, std::size_t expected)
      : Error("wrong-multiplicity",
              "expected " + std::to_string(expected) + " lattice translates, observed " +
                  std::to_string(observed)),
        observed_(observed) {}
  std::size_t observed() const noexcept { return observed_; }

 private:
  std::size_t observed_;
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error("dimension-mismatch", what) {}
};

class WindowTooSmall : public Error {
 public:
  explicit WindowTooSmall(const std::string& what) : Error("window-too-small", what) {}
};

class NonOrthogonal : public Error {
 public:
  explicit NonOrthogonal(const std::string& what) : Error("non-orthogonal", what) {}
};

class NotNormal : public Error {
 public:
  explicit NotNormal(double commutator)
      : Error("not-normal", "operator field is not normal, max commutator norm " +
                                std::to_string(commutator)),
        commutator_(commutator) {}
  double commutator() const noexcept { return commutator_; }

 private:
  double commutator_;
};

class NotInDual : public Error {
 public:
  explicit NotInDual(const std::string& what) : Error("not-in-dual", what) {}
};

class EigenFailure : public Error {
 public:
  explicit EigenFailure(const std::string& what) : Error("eigensolver-failure", what) {}
};

/// Strict lexicographic order on real vectors of equal length.
struct LexLess {
  bool operator()(const Vector& a, const Vector& b) const {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (b[i] < a[i]) return false;
    }
    return false;
  }
};

/// e^{2 pi i x}, with the integer part of x removed first so that integer
/// arguments give exactly 1.
inline Complex unit_phase(double x) {
  const double frac = x - std::round(x);
  if (frac == 0.0) return {1.0, 0.0};
  if (frac == 0.5 || frac == -0.5) return {-1.0, 0.0};
  const double theta = 2.0 * std::numbers::pi * frac;
  return {std::cos(theta), std::sin(theta)};
}

/// Multiplies v by a unit scalar so that its first coordinate with modulus
/// above `floor` becomes real and positive.
inline void normalize_phase(CVector& v, double floor = 1e-12) {
  const double scale = v.norm();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mod = std::abs(v[i]);
    if (mod > floor * std::max(1.0, scale)) {
      v *= std::conj(v[i]) / mod;
      v[i] = Complex(mod, 0.0);
      return;
    }
  }
}

inline double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace fiberkit
