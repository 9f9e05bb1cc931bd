#pragma once

#include "fiberkit/core.hpp"
#include "fiberkit/multitile.hpp"

#include <optional>
#include <vector>

namespace fiberkit {

/// Frequencies a_1..a_k of the candidate basis {e_{a_j + h}}.
struct FrequencyVector {
  std::vector<Vector> entries;
  std::size_t size() const { return entries.size(); }
};

/// E(j, l) = e^{2 pi i a_l . lambda_j}: rows follow the lambda entries,
/// columns the frequencies.
CMatrix e_matrix(const FrequencyVector& freqs, const LambdaVector& lambdas);

struct TFactorization {
  CMatrix E;
  CMatrix U;  ///< diag(e^{2 pi i a_j . omega})
  CMatrix T;  ///< E * U
};

/// Factors the kernel synthesis matrix T(j, l) = e^{2 pi i a_l . (omega + lambda_j)}.
TFactorization factor_t_matrix(const FrequencyVector& freqs, const LambdaVector& lambdas,
                               const Vector& omega);

struct LambdaSingularValues {
  LambdaVector lambdas;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double abs_det = 0.0;
};

/// Bounds on the squared-norm scale: A ||x||^2 <= ||E x||^2 <= B ||x||^2.
struct RieszCertificate {
  double A = 0.0;
  double B = 0.0;
  double min_abs_det = 0.0;
  std::vector<LambdaSingularValues> per_lambda;
};

RieszCertificate riesz_bounds(const FrequencyVector& freqs, const LambdaSet& set);

struct SeparationWitness {
  LambdaVector lambdas;
  std::size_t j = 0;
  std::size_t l = 0;
};

struct SeparationCertificate {
  Vector alpha;
  /// min over lambda-vectors and j != l of |e^{2 pi i alpha.lambda_j} - e^{2 pi i alpha.lambda_l}|.
  /// 2 (the circle diameter) when there are no pairs.
  double delta = 2.0;
  std::optional<SeparationWitness> witness;

  bool separated() const { return delta > 0.0; }
};

SeparationCertificate check_separation(const LambdaSet& set, const Vector& alpha);

/// min over all e^{2 pi i alpha.(lambda_j - lambda_l)}, j != l, of the distance to 1.
double delta_alpha_gap(const LambdaSet& set, const Vector& alpha);

struct AdmissibilityRow {
  LambdaVector lambdas;
  std::vector<double> values;  ///< v . lambda_j
  std::vector<long> residues;  ///< round(v . lambda_j) mod n, only when all values are integral
  bool integral = false;
  bool distinct = false;
};

struct AdmissibilityReport {
  bool admissible = false;
  std::vector<AdmissibilityRow> rows;
};

AdmissibilityReport check_admissibility(const LambdaSet& set, const Vector& v, long n);

/// (alpha, 2 alpha, ..., k alpha).
FrequencyVector vandermonde_frequencies(const Vector& alpha, std::size_t k);

struct BasisCertificate {
  bool pass = false;
  double A = 0.0;
  double B = 0.0;
  double min_abs_det = 0.0;
  /// (min |det|)^2 / B^{k-1}, a lower bound for A.
  double derived_lower_bound = 0.0;
  double det_tolerance = 0.0;
  RieszCertificate bounds;
};

/// Zero test used for the determinant criterion: 1e-8 * k^{k/2}, relative to
/// the largest possible |det| of a unit-modulus k x k matrix.
double det_tolerance(std::size_t k);

/// Passes when min |det E| over the set exceeds `det_tol` (default
/// det_tolerance(k)).
BasisCertificate certify_structured_basis(const FrequencyVector& freqs, const LambdaSet& set,
                                          std::optional<double> det_tol = std::nullopt);

/// alpha = a_2 - a_1 and the separation of the set at that alpha.
SeparationCertificate two_tile_converse(const FrequencyVector& freqs, const LambdaSet& set);

struct FrequencySearchResult {
  Vector alpha;
  FrequencyVector freqs;
  BasisCertificate certificate;
};

/// Scans alpha over rationals p/q, 1 <= q <= max_denominator, 0 <= p < q, in
/// every coordinate, and keeps the Vandermonde candidate with the largest
/// min |det| (first found on ties).
FrequencySearchResult search_vandermonde_frequencies(const LambdaSet& set, int dim,
                                                     int max_denominator = 16);

}  // namespace fiberkit
