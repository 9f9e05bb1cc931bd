#include "fiberkit/exponential_bases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace fiberkit {
namespace {

void check_shapes(const FrequencyVector& freqs, const LambdaVector& lambdas) {
  if (freqs.size() != lambdas.size()) {
    throw DimensionMismatch("frequency vector has " + std::to_string(freqs.size()) +
                            " entries, lambda-vector has " + std::to_string(lambdas.size()));
  }
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    if (freqs.entries[j].size() != lambdas[j].size()) {
      throw DimensionMismatch("frequency and lattice point dimensions differ");
    }
  }
}

double abs_det(const CMatrix& m) {
  if (m.rows() == 0) return 1.0;
  return std::abs(Eigen::PartialPivLU<CMatrix>(m).determinant());
}

}  // namespace

CMatrix e_matrix(const FrequencyVector& freqs, const LambdaVector& lambdas) {
  check_shapes(freqs, lambdas);
  const auto k = static_cast<Eigen::Index>(freqs.size());
  CMatrix e(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index l = 0; l < k; ++l) {
      e(j, l) = unit_phase(freqs.entries[l].dot(lambdas[j]));
    }
  }
  return e;
}

TFactorization factor_t_matrix(const FrequencyVector& freqs, const LambdaVector& lambdas,
                               const Vector& omega) {
  TFactorization f;
  f.E = e_matrix(freqs, lambdas);
  const auto k = static_cast<Eigen::Index>(freqs.size());
  f.U = CMatrix::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j) f.U(j, j) = unit_phase(freqs.entries[j].dot(omega));
  f.T = f.E * f.U;
  return f;
}

RieszCertificate riesz_bounds(const FrequencyVector& freqs, const LambdaSet& set) {
  if (set.empty()) throw std::invalid_argument("riesz_bounds needs a nonempty lambda set");
  RieszCertificate cert;
  cert.A = std::numeric_limits<double>::infinity();
  cert.B = 0.0;
  cert.min_abs_det = std::numeric_limits<double>::infinity();
  for (const auto& [lambdas, entry] : set.items()) {
    const CMatrix e = e_matrix(freqs, lambdas);
    Eigen::JacobiSVD<CMatrix> svd(e);
    const auto& s = svd.singularValues();
    LambdaSingularValues row{lambdas, s(s.size() - 1), s(0), abs_det(e)};
    cert.A = std::min(cert.A, row.sigma_min * row.sigma_min);
    cert.B = std::max(cert.B, row.sigma_max * row.sigma_max);
    cert.min_abs_det = std::min(cert.min_abs_det, row.abs_det);
    cert.per_lambda.push_back(std::move(row));
  }
  return cert;
}

SeparationCertificate check_separation(const LambdaSet& set, const Vector& alpha) {
  SeparationCertificate cert;
  cert.alpha = alpha;
  for (const auto& [lambdas, entry] : set.items()) {
    std::vector<Complex> nodes;
    nodes.reserve(lambdas.size());
    for (const Vector& lambda : lambdas.entries) nodes.push_back(unit_phase(alpha.dot(lambda)));
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      for (std::size_t l = j + 1; l < nodes.size(); ++l) {
        const double gap = std::abs(nodes[j] - nodes[l]);
        if (!cert.witness || gap < cert.delta) {
          cert.delta = std::min(gap, 2.0);
          cert.witness = SeparationWitness{lambdas, j, l};
        }
      }
    }
  }
  return cert;
}

double delta_alpha_gap(const LambdaSet& set, const Vector& alpha) {
  double gap = 2.0;
  for (const auto& [lambdas, entry] : set.items()) {
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      for (std::size_t l = 0; l < lambdas.size(); ++l) {
        if (j == l) continue;
        const Complex z = unit_phase(alpha.dot(lambdas[j] - lambdas[l]));
        gap = std::min(gap, std::abs(z - Complex(1.0, 0.0)));
      }
    }
  }
  return gap;
}

AdmissibilityReport check_admissibility(const LambdaSet& set, const Vector& v, long n) {
  if (n < 1) throw std::invalid_argument("admissibility modulus must be positive");
  AdmissibilityReport report;
  report.admissible = true;
  for (const auto& [lambdas, entry] : set.items()) {
    AdmissibilityRow row;
    row.lambdas = lambdas;
    row.integral = true;
    for (const Vector& lambda : lambdas.entries) {
      if (lambda.size() != v.size()) throw DimensionMismatch("admissibility vector dimension");
      const double value = v.dot(lambda);
      row.values.push_back(value);
      if (std::abs(value - std::round(value)) > 1e-9) row.integral = false;
    }
    if (row.integral) {
      for (double value : row.values) {
        const long r = std::lround(value) % n;
        row.residues.push_back(r < 0 ? r + n : r);
      }
      std::vector<long> sorted = row.residues;
      std::sort(sorted.begin(), sorted.end());
      row.distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    }
    report.admissible = report.admissible && row.integral && row.distinct;
    report.rows.push_back(std::move(row));
  }
  return report;
}

FrequencyVector vandermonde_frequencies(const Vector& alpha, std::size_t k) {
  if (k < 1) throw std::invalid_argument("vandermonde_frequencies needs k >= 1");
  FrequencyVector f;
  for (std::size_t j = 1; j <= k; ++j) f.entries.push_back(static_cast<double>(j) * alpha);
  return f;
}

double det_tolerance(std::size_t k) {
  return 1e-8 * std::pow(static_cast<double>(k), static_cast<double>(k) / 2.0);
}

BasisCertificate certify_structured_basis(const FrequencyVector& freqs, const LambdaSet& set,
                                          std::optional<double> det_tol) {
  BasisCertificate cert;
  cert.bounds = riesz_bounds(freqs, set);
  cert.A = cert.bounds.A;
  cert.B = cert.bounds.B;
  cert.min_abs_det = cert.bounds.min_abs_det;
  const std::size_t k = freqs.size();
  cert.det_tolerance = det_tol.value_or(det_tolerance(k));
  cert.pass = cert.min_abs_det > cert.det_tolerance;
  // det(E*E) = |det E|^2 <= sigma_min^2 * B^{k-1}.
  cert.derived_lower_bound =
      cert.min_abs_det * cert.min_abs_det / std::pow(cert.B, static_cast<double>(k) - 1.0);
  return cert;
}

SeparationCertificate two_tile_converse(const FrequencyVector& freqs, const LambdaSet& set) {
  if (freqs.size() != 2) {
    throw DimensionMismatch("two_tile_converse needs exactly two frequencies, got " +
                            std::to_string(freqs.size()));
  }
  if (set.level() != 2) throw DimensionMismatch("two_tile_converse needs a 2-tile lambda set");
  return check_separation(set, freqs.entries[1] - freqs.entries[0]);
}

FrequencySearchResult search_vandermonde_frequencies(const LambdaSet& set, int dim,
                                                     int max_denominator) {
  if (max_denominator < 1) throw std::invalid_argument("max_denominator must be positive");
  if (set.empty()) throw std::invalid_argument("frequency search needs a nonempty lambda set");
  std::vector<double> rationals{0.0};
  for (int q = 2; q <= max_denominator; ++q) {
    for (int p = 1; p < q; ++p) {
      if (std::gcd(p, q) == 1) rationals.push_back(static_cast<double>(p) / q);
    }
  }

  std::optional<FrequencySearchResult> best;
  std::vector<std::size_t> digit(static_cast<std::size_t>(dim), 0);
  Vector alpha(dim);
  while (true) {
    for (int i = 0; i < dim; ++i) alpha[i] = rationals[digit[i]];
    FrequencyVector freqs = vandermonde_frequencies(alpha, set.level());
    BasisCertificate cert = certify_structured_basis(freqs, set);
    if (!best || cert.min_abs_det > best->certificate.min_abs_det) {
      best = FrequencySearchResult{alpha, std::move(freqs), std::move(cert)};
    }
    int axis = dim - 1;
    while (axis >= 0 && ++digit[axis] == rationals.size()) digit[axis--] = 0;
    if (axis < 0) break;
  }
  return *best;
}

}  // namespace fiberkit
