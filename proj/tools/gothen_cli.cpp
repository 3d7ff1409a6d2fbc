// gothen: command-line front end for the solver, checks, spectra and ray studies.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error,
// 3 completed but an asserted check was violated.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gothen/io.hpp"
#include "gothen/metrics.hpp"

namespace fs = std::filesystem;
using namespace gothen;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitViolation = 3;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Json meta(const std::string& command, const Timer& timer, const std::optional<ExperimentConfig>& cfg) {
  Json m{{"version", GOTHEN_VERSION}, {"command", command}, {"elapsed_seconds", timer.seconds()}};
  m["config"] = cfg ? cfg->echo() : Json(nullptr);
  return m;
}

fs::path output_dir(const std::string& flag, const std::optional<ExperimentConfig>& cfg) {
  fs::path dir = !flag.empty() ? fs::path(flag) : cfg ? fs::path(cfg->output_dir) : fs::path("out");
  fs::create_directories(dir);
  return dir;
}

Json solution_summary(const SolutionPair& sol) {
  return {{"n", sol.grid().n()},
          {"laplacian", std::string(to_string(sol.laplacian))},
          {"residual", sol.residual_norm},
          {"tolerance", sol.tolerance},
          {"newton_steps", sol.newton_steps},
          {"krylov_iterations", sol.krylov_iterations},
          {"data_hash", hash_label(sol.data.provenance_hash())},
          {"psi1_range", {min_value(sol.psi1), max_value(sol.psi1)}},
          {"psi2_range", {min_value(sol.psi2), max_value(sol.psi2)}},
          {"area_h", area(metric_h(sol))},
          {"area_g", area(metric_g(sol))}};
}

// Loads --sol if given, otherwise solves the --config data.
SolutionPair obtain_solution(const std::string& sol_path, const std::optional<ExperimentConfig>& cfg) {
  if (!sol_path.empty()) return load_solution(sol_path).solution;
  if (!cfg) throw InvalidArgument("need --sol or --config");
  return solve(cfg->data(), cfg->solver);
}

ConformalMetric pick_metric(const std::string& name, const SolutionPair& sol, const SolverOptions& opts) {
  switch (parse_metric_kind(name)) {
    case MetricKind::maximal_surface_h: return metric_h(sol);
    case MetricKind::minimal_surface_g: return metric_g(sol);
    case MetricKind::flat_q: return metric_flat(quartic(sol.data));
    case MetricKind::hitchin_fiber_h_tilde: return fiber_metrics(quartic(sol.data), opts).h_tilde;
    case MetricKind::minimal_surface_fiber_g_tilde: return fiber_metrics(quartic(sol.data), opts).g_tilde;
    default: throw InvalidArgument("metric '" + name + "' cannot be built from a solution");
  }
}

std::string six_digits(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

// Walks a report and prints numbers at 6 significant digits, one per line.
void digest(const Json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (k == "meta") continue;
      digest(v, prefix.empty() ? k : prefix + "." + k, out);
    }
  } else if (j.is_array()) {
    if (j.size() <= 4 && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); })) {
      out << prefix << " = [";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ", ";
        out << (j[i].is_number_float() ? six_digits(j[i].get<double>()) : j[i].dump());
      }
      out << "]\n";
      return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) digest(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (j.is_number_float()) {
    out << prefix << " = " << six_digits(j.get<double>()) << '\n';
  } else {
    out << prefix << " = " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic-map metrics for cyclic Higgs bundles on the torus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(GOTHEN_VERSION));

  std::string config_path, out_flag, sol_path, metric_name = "h", lambda_text, report_dir;
  bool heatmaps = false;

  auto* solve_cmd = app.add_subcommand("solve", "Solve the Hitchin system for the configured data");
  solve_cmd->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--out", out_flag, "Output directory (default: output_dir from config)");

  auto* check_cmd = app.add_subcommand("check", "Run the pointwise and integrated comparison checks");
  check_cmd->add_option("--config", config_path, "JSON configuration")->check(CLI::ExistingFile);
  check_cmd->add_option("--sol", sol_path, "Solution file written by solve")->check(CLI::ExistingFile);
  check_cmd->add_option("--out", out_flag, "Output directory");
  check_cmd->add_flag("--heatmaps", heatmaps, "Write PGM heatmaps of h, g, u and curvature");

  auto* spec_cmd = app.add_subcommand("spectrum", "Marked length spectrum of one metric");
  spec_cmd->add_option("--config", config_path, "JSON configuration")->check(CLI::ExistingFile);
  spec_cmd->add_option("--sol", sol_path, "Solution file written by solve")->check(CLI::ExistingFile);
  spec_cmd->add_option("--metric", metric_name, "h, g, flat, h_tilde or g_tilde")
      ->check(CLI::IsMember({"h", "g", "flat", "h_tilde", "g_tilde"}));
  spec_cmd->add_option("--out", out_flag, "Output directory");

  auto* ray_cmd = app.add_subcommand("ray", "Degeneration study along a ray in the Hitchin base");
  ray_cmd->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
  ray_cmd->add_option("--out", out_flag, "Output directory");

  auto* gauge_cmd = app.add_subcommand("gauge-test", "Compare h for (mu, nu) and (lambda mu, nu / lambda)");
  gauge_cmd->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
  gauge_cmd->add_option("--lambda", lambda_text, "re,im")->required();
  gauge_cmd->add_option("--out", out_flag, "Output directory");

  auto* report_cmd = app.add_subcommand("report", "Print a digest of the JSON reports in a directory");
  report_cmd->add_option("--dir", report_dir, "Directory holding reports")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const Timer timer;
  try {
    std::optional<ExperimentConfig> cfg;
    if (!config_path.empty()) cfg = load_config(config_path);

    if (*solve_cmd) {
      const SolutionPair sol = solve(cfg->data(), cfg->solver);
      const fs::path dir = output_dir(out_flag, cfg);
      save_solution(dir / "solution.bin", sol);
      Json j = solution_summary(sol);
      j["meta"] = meta("solve", timer, cfg);
      write_json(dir / "solve_summary.json", j);
      std::cout << "solved N=" << sol.grid().n() << " residual " << sol.residual_norm << " in "
                << sol.newton_steps << " Newton steps -> " << (dir / "solution.bin").string() << '\n';
      return 0;
    }

    if (*check_cmd) {
      const SolutionPair sol = obtain_solution(sol_path, cfg);
      const SolverOptions opts = cfg ? cfg->solver : SolverOptions{};
      const FiberMetrics fiber = fiber_metrics(quartic(sol.data), opts);
      const auto allowance =
          calibrate_allowance(sol.grid(), opts, cfg ? cfg->eps_floor : DiscretizationAllowance{}.floor);
      const VerificationReport report = verify(sol, fiber, allowance);
      const fs::path dir = output_dir(out_flag, cfg);
      Json j = to_json(report);
      j["meta"] = meta("check", timer, cfg);
      write_json(dir / "check_report.json", j);
      if (heatmaps) {
        render_heatmap(metric_h(sol).factor, dir / "h.pgm");
        render_heatmap(metric_g(sol).factor, dir / "g.pgm");
        render_heatmap(diagnostics(sol).u, dir / "u.pgm");
        render_heatmap(curvature(sol).k_formula, dir / "curvature.pgm");
      }
      for (const auto& c : report.pointwise) {
        std::cout << (c.passed() ? "ok   " : "FAIL ") << c.name() << "  min margin " << c.min_margin
                  << "  violations " << c.violation_count << '\n';
      }
      for (const auto& c : report.integrated) {
        std::cout << (c.passed() ? "ok   " : "FAIL ") << c.name << "  " << c.lower << " <= " << c.upper << '\n';
      }
      std::cout << "max K " << report.max_k << (report.curvature_passed ? " (ok)" : " (FAIL)") << '\n';
      return report.passed() && report.curvature_passed ? 0 : kExitViolation;
    }

    if (*spec_cmd) {
      const SolutionPair sol = obtain_solution(sol_path, cfg);
      const ConformalMetric m = pick_metric(metric_name, sol, cfg ? cfg->solver : SolverOptions{});
      const auto classes = cfg ? cfg->classes : default_classes();
      const SpectrumTable table = spectrum(m, classes, cfg ? cfg->geodesic : GeodesicOptions{});
      const fs::path dir = output_dir(out_flag, cfg);
      write_text(dir / ("spectrum_" + metric_name + ".csv"), spectrum_csv(table));
      Json j = to_json(table);
      j["metric"] = metric_name;
      j["meta"] = meta("spectrum", timer, cfg);
      write_json(dir / ("spectrum_" + metric_name + ".json"), j);
      std::cout << spectrum_csv(table);
      if (!table.complete()) {
        std::cerr << "spectrum incomplete: " << table.failure_message << '\n';
        return kExitRuntime;
      }
      return 0;
    }

    if (*ray_cmd) {
      const RayStudyReport report = run_ray(cfg->ray_spec());
      const fs::path dir = output_dir(out_flag, cfg);
      Json j = to_json(report);
      j["meta"] = meta("ray", timer, cfg);
      write_json(dir / "ray_report.json", j);
      write_text(dir / "ray_spectra.csv", ray_spectra_csv(report));
      write_text(dir / "ray_areas.csv", ray_areas_csv(report));
      for (const auto& t : report.trends) {
        std::cout << t.cls.label() << "  r_h(final) " << t.final_r_h << "  r_g/8(final) "
                  << t.final_r_g_over_8 << (t.r_h_nonincreasing ? "  monotone" : "  NOT monotone") << '\n';
      }
      if (!report.points.empty()) std::cout << area_ratio_trend(report).verdict << '\n';
      if (!report.complete()) {
        std::cerr << "ray study stopped early: " << report.failure_message << '\n';
        return kExitRuntime;
      }
      return report.checks_passed ? 0 : kExitViolation;
    }

    if (*gauge_cmd) {
      const auto comma = lambda_text.find(',');
      Complex lambda;
      try {
        lambda = comma == std::string::npos
                     ? Complex{std::stod(lambda_text), 0.0}
                     : Complex{std::stod(lambda_text.substr(0, comma)), std::stod(lambda_text.substr(comma + 1))};
      } catch (const std::logic_error&) {
        throw InvalidArgument("--lambda: expected re,im but got '" + lambda_text + "'");
      }
      const HiggsData data = cfg->data();
      const SolutionPair a = solve(data, cfg->solver);
      const SolutionPair b = solve(gauge_act(data, lambda), cfg->solver);
      const RealField ha = metric_h(a).factor;
      const RealField hb = metric_h(b).factor;
      const double diff = sup_distance(ha, hb) / max_value(ha);
      const double g_diff = sup_distance(metric_g(a).factor, metric_g(b).factor) / max_value(metric_g(a).factor);
      const double tol = 1e-8;
      const fs::path dir = output_dir(out_flag, cfg);
      Json j{{"lambda", {lambda.real(), lambda.imag()}},
             {"relative_h_difference", diff},
             {"relative_g_difference", g_diff},
             {"tolerance", tol},
             {"passed", diff <= tol && g_diff <= tol}};
      j["meta"] = meta("gauge-test", timer, cfg);
      write_json(dir / "gauge_report.json", j);
      std::cout << "sup |h - h_lambda| / max h = " << diff << ", same for g = " << g_diff << '\n';
      return diff <= tol && g_diff <= tol ? 0 : kExitViolation;
    }

    if (*report_cmd) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(report_dir)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw IoError("no JSON reports in " + report_dir);
      for (const auto& f : files) {
        std::cout << "== " << f.filename().string() << '\n';
        digest(read_json(f), "", std::cout);
      }
      return 0;
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
