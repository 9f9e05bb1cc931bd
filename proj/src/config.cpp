#include "fiberkit/config.hpp"

#include <json.hpp>

#include <set>

namespace fiberkit {
namespace {

using nlohmann::json;

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t index) {
  return ptr + "/" + std::to_string(index);
}

const json& require(const json& obj, const std::string& ptr, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError(child(ptr, key), "required field is missing");
  return obj.at(key);
}

void require_object(const json& j, const std::string& ptr) {
  if (!j.is_object()) throw ConfigError(ptr, "expected an object");
}

void reject_unknown(const json& obj, const std::string& ptr, std::set<std::string> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(child(ptr, key), "unknown field");
  }
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ConfigError(ptr, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(ptr, "expected a finite number");
  return v;
}

long integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw ConfigError(ptr, "expected an integer");
  return j.get<long>();
}

double positive(const json& j, const std::string& ptr) {
  const double v = number(j, ptr);
  if (!(v > 0.0)) throw ConfigError(ptr, "expected a positive number");
  return v;
}

Vector vec(const json& j, const std::string& ptr, int dim) {
  if (!j.is_array()) throw ConfigError(ptr, "expected an array of numbers");
  if (dim >= 0 && static_cast<int>(j.size()) != dim) {
    throw ConfigError(ptr, "expected " + std::to_string(dim) + " entries");
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], child(ptr, i));
  return v;
}

Matrix mat(const json& j, const std::string& ptr, int rows, int cols) {
  if (!j.is_array() || (rows >= 0 && static_cast<int>(j.size()) != rows) || j.empty()) {
    throw ConfigError(ptr, "expected a row-major matrix" +
                               (rows >= 0 ? " with " + std::to_string(rows) + " rows" : ""));
  }
  const int c = cols >= 0 ? cols : static_cast<int>(j[0].is_array() ? j[0].size() : 0);
  Matrix m(static_cast<Eigen::Index>(j.size()), c);
  for (std::size_t r = 0; r < j.size(); ++r) {
    m.row(static_cast<Eigen::Index>(r)) = vec(j[r], child(ptr, r), c).transpose();
  }
  return m;
}

std::vector<Vector> vec_list(const json& j, const std::string& ptr, int dim) {
  if (!j.is_array()) throw ConfigError(ptr, "expected an array of points");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec(j[i], child(ptr, i), dim));
  return out;
}

OperatorSpec parse_operator(const json& j, const std::string& ptr, int dim) {
  require_object(j, ptr);
  const json& kind = require(j, ptr, "kind");
  if (!kind.is_string()) throw ConfigError(child(ptr, "kind"), "expected a string");
  OperatorSpec spec;
  const std::string k = kind.get<std::string>();
  if (k == "shift") {
    reject_unknown(j, ptr, {"kind", "h"});
    spec.kind = OperatorSpec::Kind::shift;
    spec.h = vec(require(j, ptr, "h"), child(ptr, "h"), dim);
  } else if (k == "multiplier") {
    reject_unknown(j, ptr, {"kind", "taps"});
    spec.kind = OperatorSpec::Kind::multiplier;
    const std::string tptr = child(ptr, "taps");
    const json& taps = require(j, ptr, "taps");
    if (!taps.is_array() || taps.empty()) throw ConfigError(tptr, "expected a nonempty array");
    for (std::size_t i = 0; i < taps.size(); ++i) {
      const std::string p = child(tptr, i);
      require_object(taps[i], p);
      reject_unknown(taps[i], p, {"h", "re", "im"});
      Tap tap;
      tap.h = vec(require(taps[i], p, "h"), child(p, "h"), dim);
      const double re = taps[i].contains("re") ? number(taps[i]["re"], child(p, "re")) : 0.0;
      const double im = taps[i].contains("im") ? number(taps[i]["im"], child(p, "im")) : 0.0;
      tap.value = Complex(re, im);
      spec.taps.push_back(std::move(tap));
    }
  } else if (k == "matrix_field") {
    reject_unknown(j, ptr, {"kind", "expr"});
    spec.kind = OperatorSpec::Kind::matrix_field;
    const std::string eptr = child(ptr, "expr");
    const json& expr = require(j, ptr, "expr");
    require_object(expr, eptr);
    const json& name = require(expr, eptr, "name");
    if (!name.is_string()) throw ConfigError(child(eptr, "name"), "expected a string");
    const std::string n = name.get<std::string>();
    if (n == "constant") {
      reject_unknown(expr, eptr, {"name", "re", "im"});
      const Matrix re = mat(require(expr, eptr, "re"), child(eptr, "re"), -1, -1);
      if (re.rows() != re.cols()) throw ConfigError(child(eptr, "re"), "matrix must be square");
      Matrix im = Matrix::Zero(re.rows(), re.cols());
      if (expr.contains("im")) {
        im = mat(expr["im"], child(eptr, "im"), static_cast<int>(re.rows()),
                 static_cast<int>(re.cols()));
      }
      spec.matrix.kind = MatrixFieldSpec::Kind::constant;
      spec.matrix.constant = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
    } else if (n == "diagonal_exponentials") {
      reject_unknown(expr, eptr, {"name", "h"});
      spec.matrix.kind = MatrixFieldSpec::Kind::diagonal_exponentials;
      spec.matrix.h = vec_list(require(expr, eptr, "h"), child(eptr, "h"), dim);
    } else if (n == "nilpotent") {
      reject_unknown(expr, eptr, {"name", "h"});
      spec.matrix.kind = MatrixFieldSpec::Kind::nilpotent;
      spec.matrix.h = {vec(require(expr, eptr, "h"), child(eptr, "h"), dim)};
    } else {
      throw ConfigError(child(eptr, "name"),
                        "unknown built-in '" + n +
                            "' (expected constant, diagonal_exponentials or nilpotent)");
    }
  } else {
    throw ConfigError(child(ptr, "kind"),
                      "unknown operator kind '" + k + "' (expected shift, multiplier or matrix_field)");
  }
  return spec;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  require_object(doc, "");
  reject_unknown(doc, "", {"lattice", "set", "level", "grid", "window", "tolerances",
                           "frequencies", "alpha", "admissibility", "operator", "search",
                           "h_window_radius", "output"});

  RunConfig cfg;
  cfg.canonical = doc.dump();

  const json& lattice_j = require(doc, "", "lattice");
  require_object(lattice_j, "/lattice");
  reject_unknown(lattice_j, "/lattice", {"basis"});
  const Matrix basis = mat(require(lattice_j, "/lattice", "basis"), "/lattice/basis", -1, -1);
  if (basis.rows() != basis.cols()) throw ConfigError("/lattice/basis", "basis must be square");
  const int dim = static_cast<int>(basis.rows());
  std::optional<Lattice> lattice;
  try {
    lattice.emplace(basis);
  } catch (const InvalidLattice& e) {
    throw ConfigError("/lattice/basis", e.what());
  }

  const json& set_j = require(doc, "", "set");
  require_object(set_j, "/set");
  reject_unknown(set_j, "/set", {"boxes"});
  const json& boxes_j = require(set_j, "/set", "boxes");
  if (!boxes_j.is_array()) throw ConfigError("/set/boxes", "expected an array of boxes");
  std::vector<Box> boxes;
  for (std::size_t b = 0; b < boxes_j.size(); ++b) {
    const std::string p = child("/set/boxes", b);
    require_object(boxes_j[b], p);
    reject_unknown(boxes_j[b], p, {"low", "high"});
    Box box{vec(require(boxes_j[b], p, "low"), child(p, "low"), dim),
            vec(require(boxes_j[b], p, "high"), child(p, "high"), dim)};
    for (int i = 0; i < dim; ++i) {
      if (!(box.low[i] < box.high[i])) throw ConfigError(p, "box must satisfy low < high");
    }
    boxes.push_back(std::move(box));
  }
  BoxUnion set = boxes.empty() ? BoxUnion(dim) : BoxUnion(boxes);

  const long level = integer(require(doc, "", "level"), "/level");
  if (level < 1) throw ConfigError("/level", "tiling level must be a positive integer");
  cfg.tile = std::make_shared<const MultiTileConfig>(std::move(set), *lattice, static_cast<int>(level));

  int per_axis = 64;
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    require_object(g, "/grid");
    reject_unknown(g, "/grid", {"per_axis"});
    if (g.contains("per_axis")) {
      const long n = integer(g["per_axis"], "/grid/per_axis");
      if (n < 2) throw ConfigError("/grid/per_axis", "per_axis must be at least 2");
      per_axis = static_cast<int>(n);
    }
  }
  cfg.grid = std::make_shared<const FiberSampleGrid>(make_grid(*cfg.tile, per_axis));

  if (doc.contains("window")) {
    const json& w = doc["window"];
    require_object(w, "/window");
    reject_unknown(w, "/window", {"radius"});
    if (w.contains("radius")) cfg.window_radius = positive(w["radius"], "/window/radius");
  }
  cfg.window = cfg.window_radius
                   ? std::make_shared<const LatticeWindow>(
                         LatticeWindow::within_radius(*lattice, *cfg.window_radius))
                   : std::make_shared<const LatticeWindow>(LatticeWindow::covering(*cfg.tile));

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    require_object(t, "/tolerances");
    reject_unknown(t, "/tolerances", {"rank", "residual", "det"});
    if (t.contains("rank")) cfg.tolerances.rank = positive(t["rank"], "/tolerances/rank");
    if (t.contains("residual")) {
      cfg.tolerances.residual = positive(t["residual"], "/tolerances/residual");
    }
    if (t.contains("det")) cfg.tolerances.det = positive(t["det"], "/tolerances/det");
  }

  if (doc.contains("frequencies")) {
    auto list = vec_list(doc["frequencies"], "/frequencies", dim);
    if (static_cast<long>(list.size()) != level) {
      throw ConfigError("/frequencies", "expected one frequency per tiling level (" +
                                            std::to_string(level) + ")");
    }
    cfg.frequencies = FrequencyVector{std::move(list)};
  }
  if (doc.contains("alpha")) cfg.alpha = vec(doc["alpha"], "/alpha", dim);
  if (doc.contains("admissibility")) {
    const json& a = doc["admissibility"];
    require_object(a, "/admissibility");
    reject_unknown(a, "/admissibility", {"v", "n"});
    AdmissibilityParams params;
    params.v = vec(require(a, "/admissibility", "v"), "/admissibility/v", dim);
    params.n = integer(require(a, "/admissibility", "n"), "/admissibility/n");
    if (params.n < 1) throw ConfigError("/admissibility/n", "modulus must be positive");
    cfg.admissibility = std::move(params);
  }
  if (doc.contains("operator")) cfg.op = parse_operator(doc["operator"], "/operator", dim);
  if (doc.contains("search")) {
    const json& s = doc["search"];
    require_object(s, "/search");
    reject_unknown(s, "/search", {"max_denominator"});
    if (s.contains("max_denominator")) {
      const long n = integer(s["max_denominator"], "/search/max_denominator");
      if (n < 1) throw ConfigError("/search/max_denominator", "must be positive");
      cfg.max_denominator = static_cast<int>(n);
    }
  }
  if (doc.contains("h_window_radius")) {
    cfg.h_window_radius = positive(doc["h_window_radius"], "/h_window_radius");
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    require_object(o, "/output");
    reject_unknown(o, "/output", {"json", "csv"});
    if (o.contains("json")) {
      if (!o["json"].is_string()) throw ConfigError("/output/json", "expected a path string");
      cfg.out_json = o["json"].get<std::string>();
    }
    if (o.contains("csv")) {
      if (!o["csv"].is_string()) throw ConfigError("/output/csv", "expected a path string");
      cfg.out_csv = o["csv"].get<std::string>();
    }
  }
  return cfg;
}

}  // namespace fiberkit
