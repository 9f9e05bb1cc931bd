#include "fiberkit/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fiberkit {
namespace {

using nlohmann::json;

json point_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json lambda_json(const LambdaVector& v) {
  json a = json::array();
  for (const Vector& p : v.entries) a.push_back(point_json(p));
  return a;
}

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json witness_json(const SeparationCertificate& s) {
  if (!s.witness) return nullptr;
  return {{"lambda", lambda_json(s.witness->lambdas)},
          {"j", s.witness->j},
          {"l", s.witness->l}};
}

json box_union_json(const BoxUnion& u) {
  json boxes = json::array();
  for (const Box& b : u.boxes()) boxes.push_back({{"low", point_json(b.low)}, {"high", point_json(b.high)}});
  return boxes;
}

std::vector<std::string> omega_header(int dim) {
  std::vector<std::string> h;
  for (int i = 1; i <= dim; ++i) h.push_back("omega_" + std::to_string(i));
  return h;
}

json base_body(Subcommand sub, const RunConfig& cfg) {
  return {{"subcommand", subcommand_name(sub)},
          {"input_digest", "sha256:" + sha256_hex(cfg.canonical)},
          {"dim", cfg.tile->lattice().dim()},
          {"level", cfg.tile->level()},
          {"per_axis", cfg.grid->per_axis()},
          {"grid_points", cfg.grid->size()}};
}

void set_outcome(Report& r, bool pass) {
  r.body["pass"] = pass;
  r.exit_code = pass ? kPass : kFail;
}

json tiling_json(const MultiTileConfig& tile, const TilingReport& t) {
  json violations = json::array();
  for (const auto& v : t.violations) {
    violations.push_back({{"index", v.index}, {"omega", point_json(v.omega)}, {"count", v.count}});
  }
  return {{"ok", t.ok},
          {"measure", tile.set().measure()},
          {"expected_measure", tile.level() * tile.lattice().covolume()},
          {"measure_consistent", tile.measure_consistent()},
          {"violation_count", t.violations.size()},
          {"violations", violations}};
}

// Lambda set of a verified tiling, or nullopt after recording the failed
// tiling check in the report.
std::optional<LambdaSet> tiled_lambda_set(const RunConfig& cfg, Report& r) {
  const TilingReport t = verify_k_tiling(*cfg.tile, *cfg.grid);
  if (!t.ok) {
    r.body["tiling"] = tiling_json(*cfg.tile, t);
    set_outcome(r, false);
    return std::nullopt;
  }
  r.body["tiling"] = {{"ok", true}};
  return enumerate_lambda_set(*cfg.tile, *cfg.grid);
}

void per_lambda_table(Report& r, const RieszCertificate& bounds, int dim, std::size_t k) {
  r.table.header.clear();
  for (std::size_t j = 1; j <= k; ++j) {
    for (int i = 1; i <= dim; ++i) {
      r.table.header.push_back("lambda_" + std::to_string(j) + "_" + std::to_string(i));
    }
  }
  for (const char* name : {"sigma_min", "sigma_max", "abs_det"}) r.table.header.push_back(name);
  json rows = json::array();
  for (const auto& row : bounds.per_lambda) {
    std::vector<double> cells;
    for (const Vector& p : row.lambdas.entries) cells.insert(cells.end(), p.data(), p.data() + p.size());
    cells.push_back(row.sigma_min);
    cells.push_back(row.sigma_max);
    cells.push_back(row.abs_det);
    r.table.rows.push_back(std::move(cells));
    rows.push_back({{"lambda", lambda_json(row.lambdas)},
                    {"sigma_min", row.sigma_min},
                    {"sigma_max", row.sigma_max},
                    {"abs_det", row.abs_det}});
  }
  r.body["per_lambda"] = rows;
}

json frequencies_json(const FrequencyVector& f) {
  json a = json::array();
  for (const Vector& v : f.entries) a.push_back(point_json(v));
  return a;
}

void certificate_fields(Report& r, const BasisCertificate& c) {
  r.body["A"] = c.A;
  r.body["B"] = c.B;
  r.body["min_abs_det"] = c.min_abs_det;
  r.body["derived_lower_bound"] = c.derived_lower_bound;
  r.body["det_tolerance"] = c.det_tolerance;
  r.body["basis_certified"] = c.pass;
}

void run_tile_check(const RunConfig& cfg, Report& r) {
  const TilingReport t = verify_k_tiling(*cfg.tile, *cfg.grid);
  r.body["tiling"] = tiling_json(*cfg.tile, t);
  std::map<std::string, std::size_t> histogram;
  r.table.header = omega_header(cfg.tile->lattice().dim());
  r.table.header.push_back("count");
  for (std::size_t i = 0; i < cfg.grid->size(); ++i) {
    const std::size_t count = tiling_level_at(*cfg.tile, cfg.grid->point(i));
    ++histogram[std::to_string(count)];
    std::vector<double> cells(cfg.grid->point(i).data(),
                              cfg.grid->point(i).data() + cfg.grid->point(i).size());
    cells.push_back(static_cast<double>(count));
    r.table.rows.push_back(std::move(cells));
  }
  r.body["count_histogram"] = histogram;
  set_outcome(r, t.ok);
}

void run_lambda_map(const RunConfig& cfg, Report& r) {
  const int dim = cfg.tile->lattice().dim();
  const auto k = static_cast<std::size_t>(cfg.tile->level());
  r.table.header = omega_header(dim);
  for (std::size_t j = 1; j <= k; ++j) {
    for (int i = 1; i <= dim; ++i) {
      r.table.header.push_back("lambda_" + std::to_string(j) + "_" + std::to_string(i));
    }
  }
  auto set = tiled_lambda_set(cfg, r);
  if (!set) return;

  json items = json::array();
  for (const auto& [v, e] : set->items()) {
    items.push_back({{"lambda", lambda_json(v)}, {"count", e.count}, {"weight", e.weight}});
  }
  r.body["lambda_set"] = items;
  r.body["distinct_vectors"] = set->size();
  r.body["weight_sum"] = set->weight_sum();

  const auto map = lambda_map(*cfg.tile, *cfg.grid);
  for (std::size_t i = 0; i < map.size(); ++i) {
    const Vector& omega = cfg.grid->point(i);
    std::vector<double> cells(omega.data(), omega.data() + omega.size());
    for (const Vector& p : map[i].entries) cells.insert(cells.end(), p.data(), p.data() + p.size());
    r.table.rows.push_back(std::move(cells));
  }

  json pieces = json::array();
  bool all_ok = true;
  const auto decomposition = decompose_into_one_tiles(*cfg.tile, *cfg.grid);
  for (std::size_t j = 0; j < decomposition.size(); ++j) {
    const TilingReport one = verify_piece_one_tiling(decomposition[j], *cfg.tile, *cfg.grid);
    bool boxes_ok = true;
    json boxes = nullptr;
    if (decomposition[j].boxes) {
      boxes = box_union_json(*decomposition[j].boxes);
      const MultiTileConfig piece_cfg(*decomposition[j].boxes, cfg.tile->lattice(), 1);
      boxes_ok = verify_k_tiling(piece_cfg, *cfg.grid).ok;
    }
    all_ok = all_ok && one.ok && boxes_ok;
    pieces.push_back({{"piece", j + 1}, {"boxes", boxes}, {"one_tile_ok", one.ok && boxes_ok}});
  }
  r.body["pieces"] = pieces;
  set_outcome(r, all_ok);
}

void run_separation(const RunConfig& cfg, Report& r) {
  if (!cfg.alpha) throw ConfigError("/alpha", "required for the separation subcommand");
  auto set = tiled_lambda_set(cfg, r);
  if (!set) return;
  const std::size_t k = set->level();
  const SeparationCertificate sep = check_separation(*set, *cfg.alpha);
  r.body["alpha"] = point_json(*cfg.alpha);
  r.body["delta"] = sep.delta;
  r.body["delta_alpha_gap"] = delta_alpha_gap(*set, *cfg.alpha);
  r.body["witness"] = witness_json(sep);

  const FrequencyVector freqs = vandermonde_frequencies(*cfg.alpha, k);
  const BasisCertificate cert = certify_structured_basis(freqs, *set, cfg.tolerances.det);
  certificate_fields(r, cert);
  r.body["frequencies"] = frequencies_json(freqs);
  r.body["vandermonde_bound"] = std::pow(sep.delta, static_cast<double>(k * (k - 1)));
  per_lambda_table(r, cert.bounds, cfg.tile->lattice().dim(), k);
  set_outcome(r, sep.separated());
}

void run_admissible(const RunConfig& cfg, Report& r) {
  if (!cfg.admissibility) {
    throw ConfigError("/admissibility", "required for the admissible subcommand");
  }
  auto set = tiled_lambda_set(cfg, r);
  if (!set) return;
  const auto& params = *cfg.admissibility;
  const AdmissibilityReport adm = check_admissibility(*set, params.v, params.n);
  json rows = json::array();
  for (const auto& row : adm.rows) {
    json residues = nullptr;
    if (row.integral) residues = row.residues;
    rows.push_back({{"lambda", lambda_json(row.lambdas)},
                    {"values", row.values},
                    {"residues", residues},
                    {"integral", row.integral},
                    {"distinct", row.distinct}});
  }
  r.body["v"] = point_json(params.v);
  r.body["n"] = params.n;
  r.body["rows"] = rows;

  const Vector alpha = params.v / static_cast<double>(params.n);
  const SeparationCertificate sep = check_separation(*set, alpha);
  const double implied = std::abs(Complex(1.0, 0.0) - unit_phase(1.0 / static_cast<double>(params.n)));
  r.body["alpha"] = point_json(alpha);
  r.body["delta"] = sep.delta;
  r.body["implied_delta"] = implied;
  r.body["witness"] = witness_json(sep);
  const FrequencyVector freqs = vandermonde_frequencies(alpha, set->level());
  const BasisCertificate cert = certify_structured_basis(freqs, *set, cfg.tolerances.det);
  certificate_fields(r, cert);
  r.body["frequencies"] = frequencies_json(freqs);
  per_lambda_table(r, cert.bounds, cfg.tile->lattice().dim(), set->level());
  set_outcome(r, adm.admissible);
}

void run_certify(const RunConfig& cfg, Report& r) {
  auto set = tiled_lambda_set(cfg, r);
  if (!set) return;
  const int dim = cfg.tile->lattice().dim();
  const std::size_t k = set->level();

  FrequencyVector freqs;
  std::optional<Vector> alpha = cfg.alpha;
  if (cfg.frequencies) {
    freqs = *cfg.frequencies;
    r.body["frequency_source"] = "config";
  } else {
    const auto found = search_vandermonde_frequencies(*set, dim, cfg.max_denominator);
    freqs = found.freqs;
    if (!alpha) alpha = found.alpha;
    r.body["frequency_source"] = "search";
    r.body["max_denominator"] = cfg.max_denominator;
  }
  const BasisCertificate cert = certify_structured_basis(freqs, *set, cfg.tolerances.det);
  certificate_fields(r, cert);
  r.body["frequencies"] = frequencies_json(freqs);
  r.body["lower_bound_holds"] =
      cert.A >= cert.derived_lower_bound - 1e-9 * std::max(1.0, cert.derived_lower_bound);

  std::optional<SeparationCertificate> sep;
  if (alpha) {
    sep = check_separation(*set, *alpha);
  } else if (k == 2) {
    sep = two_tile_converse(freqs, *set);
  }
  r.body["delta"] = sep ? json(sep->delta) : json(nullptr);
  r.body["separation_alpha"] = sep ? point_json(sep->alpha) : json(nullptr);
  r.body["witness"] = sep ? witness_json(*sep) : json(nullptr);
  per_lambda_table(r, cert.bounds, dim, k);
  set_outcome(r, cert.pass);
}

RangeOperatorField build_operator(const RunConfig& cfg, const RangeField& range) {
  if (!cfg.op) throw ConfigError("/operator", "required for operator subcommands");
  switch (cfg.op->kind) {
    case OperatorSpec::Kind::shift:
      return shift_operator_field(cfg.op->h, range);
    case OperatorSpec::Kind::multiplier:
      return multiplier_operator_field(cfg.op->taps, range);
    case OperatorSpec::Kind::matrix_field:
      break;
  }
  return matrix_operator_field(cfg.op->matrix, range);
}

json strata_json(const RangeField& x) {
  json out = json::object();
  for (const auto& [dim, points] : dimension_strata(x)) out[std::to_string(dim)] = points.size();
  return out;
}

void track_table(Report& r, const RunConfig& cfg,
                 const std::vector<std::vector<Complex>>& tracks) {
  r.table.header = omega_header(cfg.tile->lattice().dim());
  for (std::size_t j = 1; j <= tracks.size(); ++j) {
    r.table.header.push_back("lambda_" + std::to_string(j) + "_re");
    r.table.header.push_back("lambda_" + std::to_string(j) + "_im");
  }
  for (std::size_t i = 0; i < cfg.grid->size(); ++i) {
    const Vector& omega = cfg.grid->point(i);
    std::vector<double> cells(omega.data(), omega.data() + omega.size());
    for (const auto& track : tracks) {
      cells.push_back(track[i].real());
      cells.push_back(track[i].imag());
    }
    r.table.rows.push_back(std::move(cells));
  }
}

void run_triangularize(const RunConfig& cfg, Report& r) {
  const RangeField range = paley_wiener_range(*cfg.tile, cfg.window, cfg.grid);
  const RangeOperatorField op = build_operator(cfg, range);
  op.validate();
  const std::size_t ell = length(range);
  const TriangularDecomposition tri = triangularize(op);
  const TriangularResiduals res = check_triangular(op, tri);
  const AdjointReport adj = adjoint_and_normality(op);
  const KernelImage ki = kernel_image_fields(op, cfg.tolerances.rank);
  const double norm = op_norm(op);
  const double tol = cfg.tolerances.residual * (1.0 + norm);

  r.body["length"] = ell;
  r.body["strata"] = strata_json(range);
  r.body["op_norm"] = norm;
  r.body["normal"] = adj.normal;
  r.body["max_commutator"] = adj.max_commutator;
  r.body["tolerance"] = tol;
  r.body["residuals"] = {{"strict_lower", res.strict_lower},
                         {"unitary", res.unitary},
                         {"invariance", res.invariance},
                         {"diagonal", res.diagonal}};
  r.body["nested_spectra"] = res.nested_spectra;
  r.body["kernel_strata"] = strata_json(ki.kernel);
  r.body["image_strata"] = strata_json(ki.image);

  std::vector<std::vector<Complex>> tracks(ell, std::vector<Complex>(cfg.grid->size()));
  for (std::size_t i = 0; i < cfg.grid->size(); ++i) {
    for (Eigen::Index j = 0; j < tri.tri_mats[i].rows(); ++j) {
      tracks[static_cast<std::size_t>(j)][i] = tri.tri_mats[i](j, j);
    }
  }
  track_table(r, cfg, tracks);
  set_outcome(r, res.strict_lower <= tol && res.invariance <= tol && res.unitary <= 1e-10 &&
                     res.nested_spectra);
}

void run_diagonalize(const RunConfig& cfg, Report& r) {
  const RangeField range = paley_wiener_range(*cfg.tile, cfg.window, cfg.grid);
  const RangeOperatorField op = build_operator(cfg, range);
  op.validate();
  const std::size_t ell = length(range);
  track_table(r, cfg, {});
  r.body["length"] = ell;
  r.body["strata"] = strata_json(range);

  DiagonalDecomposition d;
  try {
    d = diagonalize_normal(op);
  } catch (const NotNormal& e) {
    const AdjointReport adj = adjoint_and_normality(op);
    r.body["rejected"] = true;
    r.body["reason"] = e.kind();
    r.body["max_commutator"] = e.commutator();
    r.body["tolerance"] = adj.tolerance;
    set_outcome(r, false);
    return;
  }
  const double norm = op_norm(op);
  const double tol = cfg.tolerances.residual * (1.0 + norm);
  const double recon = reconstruction_residual(op, d);
  const double reducing = reducing_residual(op, d);

  const auto seigs = s_eigenvalue_extract(d, cfg.h_window_radius);
  double roundtrip = 0.0;
  json s_json = json::array();
  for (std::size_t j = 0; j < seigs.size(); ++j) {
    const auto back = seigs[j].resynthesize(*cfg.grid);
    for (std::size_t i = 0; i < back.size(); ++i) {
      roundtrip = std::max(roundtrip, std::abs(back[i] - seigs[j].lambda_field[i]));
    }
    json taps = json::array();
    for (const Tap& tap : seigs[j].coeffs) {
      if (std::abs(tap.value) <= 1e-12) continue;
      taps.push_back({{"h", point_json(tap.h)}, {"re", tap.value.real()}, {"im", tap.value.imag()}});
    }
    s_json.push_back({{"track", j + 1}, {"taps", taps}});
  }

  r.body["rejected"] = false;
  r.body["op_norm"] = norm;
  r.body["max_commutator"] = d.max_commutator;
  r.body["tolerance"] = tol;
  r.body["reconstruction_residual"] = recon;
  r.body["reducing_residual"] = reducing;
  r.body["s_eigenvalues"] = s_json;
  r.body["roundtrip_residual"] = roundtrip;
  track_table(r, cfg, d.eigenvalues);
  set_outcome(r, recon <= tol && reducing <= tol && roundtrip <= 1e-9);
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"tile-check", "lambda-map",    "separation",
                                              "admissible", "certify",       "triangularize",
                                              "diagonalize"};
  return names;
}

Subcommand parse_subcommand(std::string_view name) {
  const auto& names = subcommand_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::invalid_argument("unknown subcommand '" + std::string(name) + "'");
  return static_cast<Subcommand>(it - names.begin());
}

std::string subcommand_name(Subcommand sub) {
  return subcommand_names()[static_cast<std::size_t>(sub)];
}

Report run(Subcommand sub, const RunConfig& cfg) {
  Report r;
  r.subcommand = subcommand_name(sub);
  r.body = base_body(sub, cfg);
  try {
    switch (sub) {
      case Subcommand::tile_check: run_tile_check(cfg, r); break;
      case Subcommand::lambda_map: run_lambda_map(cfg, r); break;
      case Subcommand::separation: run_separation(cfg, r); break;
      case Subcommand::admissible: run_admissible(cfg, r); break;
      case Subcommand::certify: run_certify(cfg, r); break;
      case Subcommand::triangularize: run_triangularize(cfg, r); break;
      case Subcommand::diagonalize: run_diagonalize(cfg, r); break;
    }
  } catch (const std::exception& e) {
    Report err = error_report(r.subcommand, e);
    err.body.update(base_body(sub, cfg));
    return err;
  }
  return r;
}

Report error_report(std::string subcommand, const std::exception& e) {
  Report r;
  r.subcommand = std::move(subcommand);
  json error = {{"message", e.what()}};
  if (const auto* fe = dynamic_cast<const Error*>(&e)) {
    error["kind"] = fe->kind();
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) error["pointer"] = ce->pointer();
  } else if (dynamic_cast<const std::invalid_argument*>(&e)) {
    error["kind"] = "invalid-argument";
  } else {
    error["kind"] = "internal";
  }
  r.body = {{"subcommand", r.subcommand}, {"pass", false}, {"error", error}};
  r.exit_code = kInputError;
  return r;
}

Report run_text(Subcommand sub, std::string_view config_text) {
  RunConfig cfg;
  try {
    cfg = parse_config(config_text);
  } catch (const std::exception& e) {
    return error_report(subcommand_name(sub), e);
  }
  return run(sub, cfg);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string render(const Report& report, Format format) {
  if (format == Format::json) return report.body.dump(2) + "\n";
  std::ostringstream out;
  for (std::size_t c = 0; c < report.table.header.size(); ++c) {
    out << (c ? "," : "") << report.table.header[c];
  }
  out << "\n";
  for (const auto& row : report.table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << "\n";
  }
  return out.str();
}

void emit(const Report& report, Format format, const std::string& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("io", "cannot open '" + path + "' for writing");
  file << render(report, format);
  if (!file) throw Error("io", "failed writing '" + path + "'");
}

std::string sha256_hex(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("internal", "sha256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

json field_to_json(const FiberVectorField& f) {
  json window = json::array();
  for (const Vector& p : f.window->indices()) window.push_back(point_json(p));
  json samples = json::array();
  for (std::size_t i = 0; i < f.vectors.size(); ++i) {
    json fiber = json::array();
    for (Eigen::Index c = 0; c < f.vectors[i].size(); ++c) fiber.push_back(complex_json(f.vectors[i][c]));
    samples.push_back({{"omega", point_json(f.grid->point(i))}, {"fiber", fiber}});
  }
  return {{"window", window}, {"samples", samples}};
}

json field_to_json(const RangeField& f) {
  json window = json::array();
  for (const Vector& p : f.window->indices()) window.push_back(point_json(p));
  json samples = json::array();
  for (std::size_t i = 0; i < f.bases.size(); ++i) {
    json columns = json::array();
    for (Eigen::Index c = 0; c < f.bases[i].cols(); ++c) {
      json col = json::array();
      for (Eigen::Index r = 0; r < f.bases[i].rows(); ++r) col.push_back(complex_json(f.bases[i](r, c)));
      columns.push_back(col);
    }
    samples.push_back({{"omega", point_json(f.grid->point(i))},
                       {"dim", f.bases[i].cols()},
                       {"basis", columns}});
  }
  return {{"window", window}, {"samples", samples}};
}

}  // namespace fiberkit
