#pragma once

#include "fiberkit/core.hpp"
#include "fiberkit/exponential_bases.hpp"
#include "fiberkit/fiber_model.hpp"
#include "fiberkit/multitile.hpp"
#include "fiberkit/shift_ops.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace fiberkit {

/// Schema or validation failure; `pointer()` is the JSON pointer of the
/// offending value ("" for the document root).
class ConfigError : public Error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : Error("schema", (pointer.empty() ? std::string("/") : pointer) + ": " + what),
        pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

struct Tolerances {
  double rank = 1e-9;
  double residual = 1e-8;
  std::optional<double> det;  ///< default: det_tolerance(k)
};

struct AdmissibilityParams {
  Vector v;
  long n = 1;
};

struct OperatorSpec {
  enum class Kind { shift, multiplier, matrix_field };
  Kind kind = Kind::shift;
  Vector h;                 ///< shift
  std::vector<Tap> taps;    ///< multiplier
  MatrixFieldSpec matrix;   ///< matrix_field
};

struct RunConfig {
  std::shared_ptr<const MultiTileConfig> tile;
  GridPtr grid;
  WindowPtr window;
  std::optional<double> window_radius;
  Tolerances tolerances;
  std::optional<FrequencyVector> frequencies;
  std::optional<Vector> alpha;
  std::optional<AdmissibilityParams> admissibility;
  std::optional<OperatorSpec> op;
  int max_denominator = 16;
  double h_window_radius = std::numeric_limits<double>::infinity();
  std::optional<std::string> out_json;
  std::optional<std::string> out_csv;
  /// Compact dump of the parsed document, the input of the report digest.
  std::string canonical;
};

/// Parses and validates a config document, applying defaults (per_axis 64,
/// window covering the set, module tolerances).
RunConfig parse_config(std::string_view text);

}  // namespace fiberkit
