#pragma once

// Experiment configuration, solution containers, tables, graymaps and JSON
// reports. Needs the single-header nlohmann JSON library on the include path.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gothen/degeneration.hpp"
#include "gothen/error.hpp"
#include "gothen/geodesics.hpp"
#include "gothen/higgs.hpp"
#include "gothen/solver.hpp"
#include "gothen/verification.hpp"

#ifndef GOTHEN_VERSION
#define GOTHEN_VERSION "1.0.0"
#endif

namespace gothen {

using Json = nlohmann::ordered_json;

/// Rejection of a configuration value, naming its JSON pointer path.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : InvalidArgument(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct RayConfig {
  std::vector<double> t_values = default_t_values();
  RayScaling scaling = RayScaling::nu;
  bool screen_zeros = true;
};

struct ExperimentConfig {
  int n = 64;
  LaplacianMethod laplacian = LaplacianMethod::spectral;
  std::vector<FourierTerm> mu;
  std::vector<FourierTerm> nu;
  SolverOptions solver;
  GeodesicOptions geodesic;
  std::vector<HomotopyClass> classes = default_classes();
  std::optional<RayConfig> ray;
  RayTolerances tolerances;
  double eps_floor = 1e-7;
  std::string output_dir = "out";

  GridSpec grid() const { return GridSpec(n); }
  HiggsData data() const;
  RaySpec ray_spec() const;
  Json echo() const;
};

namespace detail {

inline void reject_unknown(const Json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(path + "/" + key, "unknown key");
  }
}

template <class T>
T get_as(const Json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path, "wrong type: " + j.dump());
  }
}

inline int get_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer, got " + j.dump());
  return j.get<int>();
}

inline double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number, got " + j.dump());
  return j.get<double>();
}

inline bool get_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false, got " + j.dump());
  return j.get<bool>();
}

inline Complex parse_coeff(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError(path, "expected a number or [re, im]");
}

inline std::vector<FourierTerm> parse_terms(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected a list of {mode, coeff} terms");
  std::vector<FourierTerm> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    reject_unknown(j[i], p, {"mode", "coeff"});
    if (!j[i].contains("mode") || !j[i].contains("coeff")) throw ConfigError(p, "needs mode and coeff");
    const auto& mode = j[i]["mode"];
    if (!mode.is_array() || mode.size() != 2) throw ConfigError(p + "/mode", "expected [kx, ky]");
    terms.push_back({{get_int(mode[0], p + "/mode/0"), get_int(mode[1], p + "/mode/1")},
                     parse_coeff(j[i]["coeff"], p + "/coeff")});
  }
  return terms;
}

inline Json terms_json(const std::vector<FourierTerm>& terms) {
  Json out = Json::array();
  for (const auto& t : terms) {
    out.push_back({{"mode", {t.mode.kx, t.mode.ky}}, {"coeff", {t.coeff.real(), t.coeff.imag()}}});
  }
  return out;
}

inline HomotopyClass parse_class(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [p, q_w]");
  HomotopyClass c{get_int(j[0], path + "/0"), get_int(j[1], path + "/1")};
  if (c.is_zero()) throw ConfigError(path, "class (0,0) has no closed geodesic");
  return c;
}

}  // namespace detail

/// Validates the structure and every value; materializes defaults.
inline ExperimentConfig parse_config(const Json& root) {
  using namespace detail;
  reject_unknown(root, "", {"grid", "data", "solver", "geodesic", "classes", "ray", "tolerances", "output_dir"});
  ExperimentConfig c;

  if (!root.contains("grid")) throw ConfigError("/grid", "missing");
  const auto& grid = root["grid"];
  reject_unknown(grid, "/grid", {"n", "laplacian"});
  if (!grid.contains("n")) throw ConfigError("/grid/n", "missing");
  c.n = get_int(grid["n"], "/grid/n");
  try {
    GridSpec check(c.n);
  } catch (const InvalidArgument& e) {
    throw ConfigError("/grid/n", e.what());
  }
  if (grid.contains("laplacian")) {
    try {
      c.laplacian = parse_laplacian_method(get_as<std::string>(grid["laplacian"], "/grid/laplacian"));
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidArgument& e) {
      throw ConfigError("/grid/laplacian", e.what());
    }
  }

  if (!root.contains("data")) throw ConfigError("/data", "missing");
  const auto& data = root["data"];
  reject_unknown(data, "/data", {"mu", "nu"});
  if (!data.contains("mu")) throw ConfigError("/data/mu", "missing");
  if (!data.contains("nu")) throw ConfigError("/data/nu", "missing");
  c.mu = parse_terms(data["mu"], "/data/mu");
  c.nu = parse_terms(data["nu"], "/data/nu");

  c.solver.laplacian = c.laplacian;
  if (root.contains("solver")) {
    const auto& s = root["solver"];
    reject_unknown(s, "/solver", {"tolerance", "max_newton_steps", "damping_floor", "max_krylov_iterations"});
    if (s.contains("tolerance")) c.solver.tolerance = get_number(s["tolerance"], "/solver/tolerance");
    if (s.contains("max_newton_steps")) c.solver.max_newton_steps = get_int(s["max_newton_steps"], "/solver/max_newton_steps");
    if (s.contains("damping_floor")) c.solver.damping_floor = get_number(s["damping_floor"], "/solver/damping_floor");
    if (s.contains("max_krylov_iterations")) c.solver.max_krylov_iterations = get_int(s["max_krylov_iterations"], "/solver/max_krylov_iterations");
    if (!(c.solver.tolerance > 0.0)) throw ConfigError("/solver/tolerance", "must be positive");
  }
  if (root.contains("geodesic")) {
    const auto& g = root["geodesic"];
    reject_unknown(g, "/geodesic", {"points", "relative_tolerance", "max_iterations", "refine", "basepoint_stride"});
    if (g.contains("points")) c.geodesic.points = get_int(g["points"], "/geodesic/points");
    if (g.contains("relative_tolerance")) c.geodesic.relative_tolerance = get_number(g["relative_tolerance"], "/geodesic/relative_tolerance");
    if (g.contains("max_iterations")) c.geodesic.max_iterations = get_int(g["max_iterations"], "/geodesic/max_iterations");
    if (g.contains("refine")) c.geodesic.refine = get_bool(g["refine"], "/geodesic/refine");
    if (g.contains("basepoint_stride")) c.geodesic.basepoint_stride = get_int(g["basepoint_stride"], "/geodesic/basepoint_stride");
    if (c.geodesic.points < 8) throw ConfigError("/geodesic/points", "need at least 8");
  }
  if (root.contains("classes")) {
    const auto& cl = root["classes"];
    if (!cl.is_array() || cl.empty()) throw ConfigError("/classes", "expected a nonempty list of [p, q_w]");
    c.classes.clear();
    for (std::size_t i = 0; i < cl.size(); ++i) c.classes.push_back(parse_class(cl[i], "/classes/" + std::to_string(i)));
  }
  if (root.contains("ray")) {
    const auto& r = root["ray"];
    reject_unknown(r, "/ray", {"t_values", "scaling", "screen_zeros"});
    RayConfig rc;
    if (r.contains("t_values")) {
      if (!r["t_values"].is_array()) throw ConfigError("/ray/t_values", "expected a list of numbers");
      rc.t_values.clear();
      for (std::size_t i = 0; i < r["t_values"].size(); ++i) {
        const std::string p = "/ray/t_values/" + std::to_string(i);
        rc.t_values.push_back(get_number(r["t_values"][i], p));
        if (!(rc.t_values.back() > 0.0)) throw ConfigError(p, "must be positive");
        if (i > 0 && !(rc.t_values[i] > rc.t_values[i - 1])) throw ConfigError(p, "t_values must be strictly increasing");
      }
      if (rc.t_values.empty()) throw ConfigError("/ray/t_values", "empty");
    }
    if (r.contains("scaling")) {
      try {
        rc.scaling = parse_ray_scaling(get_as<std::string>(r["scaling"], "/ray/scaling"));
      } catch (const ConfigError&) {
        throw;
      } catch (const InvalidArgument& e) {
        throw ConfigError("/ray/scaling", e.what());
      }
    }
    if (r.contains("screen_zeros")) rc.screen_zeros = get_bool(r["screen_zeros"], "/ray/screen_zeros");
    c.ray = rc;
  }
  if (root.contains("tolerances")) {
    const auto& t = root["tolerances"];
    reject_unknown(t, "/tolerances", {"final_ratio", "wiggle", "scaling", "ratio_band", "eps_floor"});
    if (t.contains("final_ratio")) c.tolerances.final_ratio = get_number(t["final_ratio"], "/tolerances/final_ratio");
    if (t.contains("wiggle")) c.tolerances.wiggle = get_number(t["wiggle"], "/tolerances/wiggle");
    if (t.contains("scaling")) c.tolerances.scaling = get_number(t["scaling"], "/tolerances/scaling");
    if (t.contains("ratio_band")) c.tolerances.ratio_band = get_number(t["ratio_band"], "/tolerances/ratio_band");
    if (t.contains("eps_floor")) c.eps_floor = get_number(t["eps_floor"], "/tolerances/eps_floor");
  }
  if (root.contains("output_dir")) c.output_dir = get_as<std::string>(root["output_dir"], "/output_dir");

  // Band limits and vanishing fields surface here with their field path.
  for (const char* which : {"mu", "nu"}) {
    const auto& terms = std::string(which) == "mu" ? c.mu : c.nu;
    try {
      sample_fourier(terms, c.grid());
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("/data/") + which, e.what());
    }
  }
  try {
    (void)c.data();
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.find("ν") != std::string::npos ? "/data/nu" : "/data/mu", msg);
  }
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("/", std::string("parse error: ") + e.what());
  }
  return parse_config(root);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline HiggsData ExperimentConfig::data() const {
  return HiggsData::from_coefficients(mu, nu, grid());
}

inline RaySpec ExperimentConfig::ray_spec() const {
  const RayConfig rc = ray.value_or(RayConfig{});
  RaySpec spec(data());
  spec.t_values = rc.t_values;
  spec.classes = classes;
  spec.solver = solver;
  spec.geodesic = geodesic;
  spec.scaling = rc.scaling;
  spec.tolerances = tolerances;
  spec.screen_zeros = rc.screen_zeros;
  return spec;
}

inline Json ExperimentConfig::echo() const {
  Json classes_json = Json::array();
  for (const auto& c : classes) classes_json.push_back({c.p, c.q});
  Json j{{"grid", {{"n", n}, {"laplacian", std::string(to_string(laplacian))}}},
         {"data", {{"mu", detail::terms_json(mu)}, {"nu", detail::terms_json(nu)}}},
         {"solver",
          {{"tolerance", solver.tolerance},
           {"max_newton_steps", solver.max_newton_steps},
           {"damping_floor", solver.damping_floor},
           {"max_krylov_iterations", solver.max_krylov_iterations}}},
         {"geodesic",
          {{"points", geodesic.points},
           {"relative_tolerance", geodesic.relative_tolerance},
           {"max_iterations", geodesic.max_iterations},
           {"refine", geodesic.refine},
           {"basepoint_stride", geodesic.basepoint_stride}}},
         {"classes", classes_json}};
  if (ray) {
    j["ray"] = {{"t_values", ray->t_values},
                {"scaling", std::string(to_string(ray->scaling))},
                {"screen_zeros", ray->screen_zeros}};
  }
  j["tolerances"] = {{"final_ratio", tolerances.final_ratio},
                     {"wiggle", tolerances.wiggle},
                     {"scaling", tolerances.scaling},
                     {"ratio_band", tolerances.ratio_band},
                     {"eps_floor", eps_floor}};
  j["output_dir"] = output_dir;
  return j;
}

// ---------------------------------------------------------------------------
// Binary solution container, little-endian:
//   "GOTHSOL\0" | u32 version | u32 N | u32 kind | u32 laplacian | u64 hash
//   | f64 residual | f64 tolerance | i32 newton | i32 krylov | i32 mu_band
//   | i32 nu_band | f64[N*N] psi1 | f64[N*N] psi2 | u8 has_data
//   | [f64 re, f64 im][N*N] mu | [..] nu
// Arrays are row-major with x fastest.

enum class SolutionKind : std::uint32_t { maximal = 0, hitchin_fiber = 1 };

inline constexpr char kSolutionMagic[8] = {'G', 'O', 'T', 'H', 'S', 'O', 'L', '\0'};
inline constexpr std::uint32_t kSolutionVersion = 1;

namespace detail {

template <class T>
void put(std::ostream& out, T value) {
  std::uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T take(std::istream& in, const std::string& what) {
  std::uint8_t bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw IoError("solution file truncated while reading " + what);
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace detail

struct StoredSolution {
  SolutionPair solution;
  SolutionKind kind = SolutionKind::maximal;
  std::uint64_t hash = 0;
};

inline void save_solution(const std::filesystem::path& path, const SolutionPair& sol,
                          SolutionKind kind = SolutionKind::maximal) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kSolutionMagic, sizeof kSolutionMagic);
  using detail::put;
  const auto n = static_cast<std::uint32_t>(sol.grid().n());
  put<std::uint32_t>(out, kSolutionVersion);
  put<std::uint32_t>(out, n);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(kind));
  put<std::uint32_t>(out, sol.laplacian == LaplacianMethod::spectral ? 0u : 1u);
  put<std::uint64_t>(out, sol.data.provenance_hash());
  put<double>(out, sol.residual_norm);
  put<double>(out, sol.tolerance);
  put<std::int32_t>(out, sol.newton_steps);
  put<std::int32_t>(out, sol.krylov_iterations);
  put<std::int32_t>(out, sol.data.mu_band());
  put<std::int32_t>(out, sol.data.nu_band());
  for (double v : sol.psi1.values()) put<double>(out, v);
  for (double v : sol.psi2.values()) put<double>(out, v);
  put<std::uint8_t>(out, 1);
  for (const auto* f : {&sol.data.mu(), &sol.data.nu()}) {
    for (const auto& z : f->values()) {
      put<double>(out, z.real());
      put<double>(out, z.imag());
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

inline StoredSolution load_solution(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kSolutionMagic, 8) != 0) {
    throw IoError(path.string() + " is not a solution file");
  }
  using detail::take;
  const auto version = take<std::uint32_t>(in, "version");
  if (version != kSolutionVersion) {
    throw IoError("unsupported solution file version " + std::to_string(version));
  }
  const int n = static_cast<int>(take<std::uint32_t>(in, "N"));
  const auto kind = static_cast<SolutionKind>(take<std::uint32_t>(in, "kind"));
  const auto lap = take<std::uint32_t>(in, "laplacian");
  const auto hash = take<std::uint64_t>(in, "hash");
  const double residual = take<double>(in, "residual");
  const double tolerance = take<double>(in, "tolerance");
  const int newton = take<std::int32_t>(in, "newton steps");
  const int krylov = take<std::int32_t>(in, "krylov iterations");
  const int mu_band = take<std::int32_t>(in, "mu band");
  const int nu_band = take<std::int32_t>(in, "nu band");
  GridSpec g(n);
  RealField psi1(g), psi2(g);
  for (std::size_t k = 0; k < g.size(); ++k) psi1[k] = take<double>(in, "psi1");
  for (std::size_t k = 0; k < g.size(); ++k) psi2[k] = take<double>(in, "psi2");
  if (take<std::uint8_t>(in, "data flag") != 1) {
    throw IoError(path.string() + " carries no data block");
  }
  ComplexField mu(g), nu(g);
  for (auto* f : {&mu, &nu}) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double re = take<double>(in, "data");
      const double im = take<double>(in, "data");
      (*f)[k] = {re, im};
    }
  }
  HiggsData data(std::move(mu), std::move(nu), mu_band, nu_band);
  if (data.provenance_hash() != hash) throw IoError(path.string() + ": data hash mismatch");
  SolutionPair sol{std::move(psi1), std::move(psi2), std::move(data), residual, tolerance,
                   lap == 0 ? LaplacianMethod::spectral : LaplacianMethod::fd5, newton, krylov};
  return {std::move(sol), kind, hash};
}

// ---------------------------------------------------------------------------
// Tables and images.

inline std::string full_precision(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::string spectrum_csv(const SpectrumTable& t) {
  std::ostringstream s;
  s << "p,q_w,length,stage1_length,refined\n";
  for (const auto& e : t.entries) {
    s << e.cls.p << ',' << e.cls.q << ',' << full_precision(e.length) << ','
      << full_precision(e.stage1_length) << ',' << (e.refined ? 1 : 0) << '\n';
  }
  return s.str();
}

struct HeatmapScale {
  double min = 0.0;
  double max = 0.0;
};

/// Plain graymap (P2), one image row per y index from y = 0, min-max
/// normalized to 0..255. The scale goes to `path` + ".scale.txt".
inline HeatmapScale render_heatmap(const RealField& f, const std::filesystem::path& path) {
  if (!all_finite(f)) throw InvalidArgument("heatmap of a non-finite field");
  const HeatmapScale scale{min_value(f), max_value(f)};
  const double span = scale.max - scale.min;
  std::ostringstream s;
  const int n = f.grid().n();
  s << "P2\n" << n << ' ' << n << "\n255\n";
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int level = span > 0.0 ? static_cast<int>(std::lround(255.0 * (f(ix, iy) - scale.min) / span)) : 0;
      s << level << (ix + 1 < n ? ' ' : '\n');
    }
  }
  write_text(path, s.str());
  write_text(path.string() + ".scale.txt",
             "min " + full_precision(scale.min) + "\nmax " + full_precision(scale.max) + "\n");
  return scale;
}

// ---------------------------------------------------------------------------
// JSON reports.

inline Json to_json(const DominationReport& r) {
  return {{"check", r.name()},     {"passed", r.passed()},       {"violations", r.violation_count},
          {"min_margin", r.min_margin}, {"allowance", r.allowance}, {"worst", {r.worst_x, r.worst_y}}};
}

inline Json to_json(const BochnerReport& b) {
  return {{"constant_f1", b.constant_f1},
          {"constant_f2", b.constant_f2},
          {"spread_f1", b.spread_f1},
          {"spread_f2", b.spread_f2},
          {"raw_constant_f1", b.raw_constant_f1},
          {"raw_constant_f2", b.raw_constant_f2},
          {"subgrid_points", b.subgrid_points},
          {"reference_constant_f2", BochnerReport::reference_constant_f2},
          {"derived_constant", BochnerReport::derived_constant},
          {"f2_matches_derived", b.f2_matches(BochnerReport::derived_constant, 0.05)},
          {"f2_discrepancy_with_reference", b.discrepancy_with_reference_f2()}};
}

inline Json to_json(const VerificationReport& r) {
  Json pointwise = Json::array();
  for (const auto& c : r.pointwise) pointwise.push_back(to_json(c));
  Json integrated = Json::array();
  for (const auto& c : r.integrated) {
    integrated.push_back({{"check", c.name}, {"passed", c.passed()}, {"lower", c.lower}, {"upper", c.upper}});
  }
  Json j{{"n", r.n},
         {"passed", r.passed()},
         {"violations", r.violation_total()},
         {"eps_disc", r.allowance.value()},
         {"eps_constant", r.allowance.constant},
         {"constant_data", r.constant_data},
         {"pointwise", pointwise},
         {"integrated", integrated},
         {"curvature",
          {{"max_k", r.max_k},
           {"min_k", r.min_k},
           {"asserted_max_k_le_eps", r.curvature_passed},
           {"fd_agreement", r.curvature_agreement},
           {"total_curvature", r.total_curvature}}},
         {"max_f1_plus_f2", r.max_f_sum},
         {"areas",
          {{"flat", r.areas.flat},
           {"h", r.areas.h},
           {"h_tilde", r.areas.h_tilde},
           {"g", r.areas.g},
           {"g_tilde", r.areas.g_tilde},
           {"h_over_flat", r.areas.ratio_h_flat()},
           {"reported_bound", 1.5}}},
         {"jacobian_dominance_margin", r.jacobian_margin}};
  j["bochner"] = r.bochner ? to_json(*r.bochner) : Json(nullptr);
  j["notes"] = r.notes;
  return j;
}

inline Json to_json(const SpectrumTable& t) {
  Json entries = Json::array();
  for (const auto& e : t.entries) {
    entries.push_back({{"class", {e.cls.p, e.cls.q}},
                       {"length", e.length},
                       {"stage1_length", e.stage1_length},
                       {"refined", e.refined}});
  }
  Json j{{"provenance", t.provenance}, {"entries", entries}, {"complete", t.complete()}};
  if (t.failure_index) {
    j["failure_index"] = *t.failure_index;
    j["failure_message"] = t.failure_message;
  }
  return j;
}

inline Json to_json(const AreaTrend& a) {
  return {{"t", a.t},
          {"a", a.a},
          {"lower_bound", a.lower_bound},
          {"upper_bound_reported", a.upper_bound},
          {"lower_ok", a.lower_ok},
          {"upper_ok", a.upper_ok},
          {"nonincreasing", a.nonincreasing},
          {"final_ok", a.final_ok},
          {"verdict", a.verdict}};
}

inline Json to_json(const RayStudyReport& r) {
  Json classes = Json::array();
  for (const auto& c : r.classes) classes.push_back({c.p, c.q});
  Json screened = Json::array();
  for (const auto& c : r.screened_out) screened.push_back({c.p, c.q});
  Json points = Json::array();
  for (const auto& p : r.points) {
    points.push_back({{"t", p.t},
                      {"area_h", p.area_h},
                      {"area_g", p.area_g},
                      {"area_flat", p.area_flat},
                      {"area_h_tilde", p.area_h_tilde},
                      {"a", p.a},
                      {"r_h", p.r_h},
                      {"r_g", p.r_g},
                      {"newton_steps", p.newton_steps},
                      {"residual", p.residual},
                      {"checks_passed", p.verification.passed()},
                      {"violations", p.verification.violation_total()},
                      {"max_k", p.verification.max_k},
                      {"max_f1_plus_f2", p.verification.max_f_sum}});
  }
  Json trends = Json::array();
  for (const auto& t : r.trends) {
    trends.push_back({{"class", {t.cls.p, t.cls.q}},
                      {"r_h_nonincreasing", t.r_h_nonincreasing},
                      {"final_r_h", t.final_r_h},
                      {"final_r_h_ok", t.final_r_h <= 1.0 + r.tolerances.final_ratio},
                      {"final_r_g_over_8", t.final_r_g_over_8},
                      {"final_r_g_ok", std::abs(t.final_r_g_over_8 - 1.0) <= r.tolerances.final_ratio},
                      {"rate_log_rh_minus_1_vs_log_t", std::isfinite(t.rate) ? Json(t.rate) : Json(nullptr)},
                      {"sandwich_flat_h_h_tilde", t.sandwich},
                      {"r_g_over_r_h_in_band", t.ratio_band}});
  }
  Json j{{"t_values", r.t_values},
         {"scaling", std::string(to_string(r.scaling))},
         {"classes", classes},
         {"screened_out", screened},
         {"screening_rule", r.screening_rule},
         {"tolerances",
          {{"final_ratio", r.tolerances.final_ratio},
           {"wiggle", r.tolerances.wiggle},
           {"scaling", r.tolerances.scaling},
           {"ratio_band", r.tolerances.ratio_band}}},
         {"complete", r.complete()},
         {"checks_passed", r.checks_passed},
         {"points", points},
         {"trends", trends},
         {"flat_length_scaling_error", r.flat_length_scaling_error},
         {"flat_area_scaling_error", r.flat_area_scaling_error},
         {"flat_scaling_ok", r.flat_length_scaling_error <= r.tolerances.scaling &&
                                 r.flat_area_scaling_error <= r.tolerances.scaling}};
  if (r.failure_index) {
    j["failure_index"] = *r.failure_index;
    j["failure_message"] = r.failure_message;
  }
  if (!r.points.empty()) j["area_trend"] = to_json(area_ratio_trend(r));
  return j;
}

/// Per-t spectra of h, g, flat and h̃ with the ratios, one row per (t, class).
inline std::string ray_spectra_csv(const RayStudyReport& r) {
  std::ostringstream s;
  s << "t,p,q_w,length_h,length_g,length_flat,length_h_tilde,r_h,r_g\n";
  for (const auto& p : r.points) {
    for (std::size_t c = 0; c < r.classes.size(); ++c) {
      s << full_precision(p.t) << ',' << r.classes[c].p << ',' << r.classes[c].q << ','
        << full_precision(p.spectrum_h.entries[c].length) << ','
        << full_precision(p.spectrum_g.entries[c].length) << ','
        << full_precision(p.spectrum_flat.entries[c].length) << ','
        << full_precision(p.spectrum_h_tilde.entries[c].length) << ',' << full_precision(p.r_h[c])
        << ',' << full_precision(p.r_g[c]) << '\n';
    }
  }
  return s.str();
}

inline std::string ray_areas_csv(const RayStudyReport& r) {
  std::ostringstream s;
  s << "t,area_h,area_g,area_flat,area_h_tilde,a\n";
  for (const auto& p : r.points) {
    s << full_precision(p.t) << ',' << full_precision(p.area_h) << ',' << full_precision(p.area_g)
      << ',' << full_precision(p.area_flat) << ',' << full_precision(p.area_h_tilde) << ','
      << full_precision(p.a) << '\n';
  }
  return s.str();
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace gothen
