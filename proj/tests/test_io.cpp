#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gothen/io.hpp"

using namespace gothen;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "grid": {"n": 32},
  "data": {
    "mu": [{"mode": [0, 0], "coeff": 1}],
    "nu": [{"mode": [0, 0], "coeff": 1}, {"mode": [1, 0], "coeff": [0.25, 0]}]
  }
})";

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("gothen_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Expects a ConfigError whose path is `path`.
void expect_config_error(const std::string& text, const std::string& path) {
  try {
    parse_config_text(text);
    ADD_FAILURE() << "accepted: " << text;
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), path) << e.what();
  }
}

}  // namespace

TEST(Config, MinimalMaterializesDefaults) {
  const auto c = parse_config_text(kMinimal);
  EXPECT_EQ(c.n, 32);
  EXPECT_EQ(c.laplacian, LaplacianMethod::spectral);
  EXPECT_EQ(c.classes, default_classes());
  EXPECT_FALSE(c.ray.has_value());
  const Json echo = c.echo();
  EXPECT_EQ(echo["solver"]["tolerance"], SolverOptions{}.tolerance);
  EXPECT_EQ(echo["geodesic"]["points"], 512);
  EXPECT_EQ(echo["tolerances"]["eps_floor"], 1e-7);
  EXPECT_EQ(echo["data"]["nu"][1]["coeff"][0], 0.25);
}

TEST(Config, EchoReparsesToSameConfig) {
  auto root = Json::parse(kMinimal);
  root["ray"] = {{"t_values", {1, 2, 4}}, {"scaling", "symmetric"}};
  root["classes"] = {{1, 0}, {2, -1}};
  const auto c = parse_config(root);
  const auto again = parse_config(c.echo());
  EXPECT_EQ(again.echo(), c.echo());
  EXPECT_EQ(again.ray->scaling, RayScaling::symmetric);
  EXPECT_EQ(again.classes.back(), (HomotopyClass{2, -1}));
}

TEST(Config, DataMatchesDirectSampling) {
  const auto c = parse_config_text(kMinimal);
  const std::vector<FourierTerm> nu{{{0, 0}, 1.0}, {{1, 0}, 0.25}};
  const auto direct = sample_fourier(nu, GridSpec(32));
  const auto from_config = c.data().nu();
  for (std::size_t k = 0; k < direct.size(); ++k) EXPECT_EQ(direct[k], from_config[k]);
}

TEST(Config, RejectsUnknownKeysByPath) {
  auto root = Json::parse(kMinimal);
  root["grid"]["spacing"] = 0.1;
  expect_config_error(root.dump(), "/grid/spacing");
  root = Json::parse(kMinimal);
  root["data"]["nu"][1]["phase"] = 0;
  expect_config_error(root.dump(), "/data/nu/1/phase");
  root = Json::parse(kMinimal);
  root["extra"] = true;
  expect_config_error(root.dump(), "/extra");
}

TEST(Config, RejectsBadValuesWithPath) {
  auto root = Json::parse(kMinimal);
  root["grid"]["n"] = 8;
  expect_config_error(root.dump(), "/grid/n");
  root = Json::parse(kMinimal);
  root["grid"]["n"] = "64";
  expect_config_error(root.dump(), "/grid/n");
  root = Json::parse(kMinimal);
  root["grid"]["laplacian"] = "fd9";
  expect_config_error(root.dump(), "/grid/laplacian");
  root = Json::parse(kMinimal);
  root["classes"] = {{0, 0}};
  expect_config_error(root.dump(), "/classes/0");
  root = Json::parse(kMinimal);
  root["ray"] = {{"t_values", {1, 4, 2}}};
  expect_config_error(root.dump(), "/ray/t_values/2");
  root = Json::parse(kMinimal);
  root["data"]["mu"][0]["coeff"] = {1, 2, 3};
  expect_config_error(root.dump(), "/data/mu/0/coeff");
  expect_config_error("{\"grid\": ", "/");
}

TEST(Config, BandLimitMessagePassesThrough) {
  auto root = Json::parse(kMinimal);
  root["grid"]["n"] = 64;
  root["data"]["nu"][1]["mode"] = {40, 0};
  try {
    parse_config(root);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "/data/nu");
    EXPECT_NE(std::string(e.what()).find("mode (40,0) violates the band limit"), std::string::npos);
  }
}

TEST(Config, VanishingNuMessagePassesThrough) {
  auto root = Json::parse(kMinimal);
  root["data"]["nu"] = {{{"mode", {0, 0}}, {"coeff", 0}}};
  try {
    parse_config(root);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "/data/nu");
    EXPECT_NE(std::string(e.what()).find("unsolvable on periodic domain"), std::string::npos);
  }
}

TEST(SolutionFile, RoundTripIsBitwise) {
  const auto dir = scratch_dir("roundtrip");
  const auto sol = solve(parse_config_text(kMinimal).data());
  save_solution(dir / "a.bin", sol, SolutionKind::hitchin_fiber);
  const auto back = load_solution(dir / "a.bin");
  EXPECT_EQ(back.kind, SolutionKind::hitchin_fiber);
  EXPECT_EQ(back.hash, sol.data.provenance_hash());
  EXPECT_EQ(back.solution.psi1.storage(), sol.psi1.storage());
  EXPECT_EQ(back.solution.psi2.storage(), sol.psi2.storage());
  EXPECT_EQ(back.solution.data.mu().storage(), sol.data.mu().storage());
  EXPECT_EQ(back.solution.data.nu().storage(), sol.data.nu().storage());
  EXPECT_EQ(back.solution.residual_norm, sol.residual_norm);
  EXPECT_EQ(back.solution.newton_steps, sol.newton_steps);
  EXPECT_EQ(back.solution.data.nu_band(), 1);
  save_solution(dir / "b.bin", back.solution, SolutionKind::hitchin_fiber);
  EXPECT_EQ(slurp(dir / "a.bin"), slurp(dir / "b.bin"));
  // header 8 + 4*4 + 8 + 2*8 + 4*4, two real fields, flag, two complex fields
  EXPECT_EQ(fs::file_size(dir / "a.bin"), 64u + 2u * 8u * 1024u + 1u + 2u * 16u * 1024u);
}

TEST(SolutionFile, RejectsCorruptFiles) {
  const auto dir = scratch_dir("corrupt");
  const auto sol = solve(HiggsData::constant(GridSpec(16), 1.0, 2.0));
  save_solution(dir / "ok.bin", sol);
  const std::string bytes = slurp(dir / "ok.bin");
  {
    std::ofstream(dir / "short.bin", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  }
  EXPECT_THROW(load_solution(dir / "short.bin"), IoError);
  std::string bad = bytes;
  bad[0] = 'X';
  { std::ofstream(dir / "magic.bin", std::ios::binary) << bad; }
  EXPECT_THROW(load_solution(dir / "magic.bin"), IoError);
  bad = bytes;
  bad[bad.size() - 3] ^= 0x10;  // flips a bit of the stored ν
  { std::ofstream(dir / "hash.bin", std::ios::binary) << bad; }
  EXPECT_THROW(load_solution(dir / "hash.bin"), IoError);
  EXPECT_THROW(load_solution(dir / "missing.bin"), IoError);
}

TEST(Heatmap, StripesAndScale) {
  const auto dir = scratch_dir("heatmap");
  GridSpec g(16);
  // value depends on x only: every image row is identical, 0 at x=0, 255 at x=15
  const auto f = RealField::sample(g, [](double x, double) { return 3.0 + 2.0 * x; });
  const auto scale = render_heatmap(f, dir / "f.pgm");
  EXPECT_DOUBLE_EQ(scale.min, 3.0);
  EXPECT_DOUBLE_EQ(scale.max, 3.0 + 2.0 * 15.0 / 16.0);
  std::ifstream in(dir / "f.pgm");
  std::string magic;
  int w, h, maxv;
  in >> magic >> w >> h >> maxv;
  EXPECT_EQ(magic, "P2");
  EXPECT_EQ(w, 16);
  EXPECT_EQ(h, 16);
  EXPECT_EQ(maxv, 255);
  for (int iy = 0; iy < 16; ++iy) {
    for (int ix = 0; ix < 16; ++ix) {
      int level;
      in >> level;
      EXPECT_EQ(level, static_cast<int>(std::lround(255.0 * ix / 15.0)));
    }
  }
  EXPECT_NE(slurp(dir / "f.pgm.scale.txt").find("min 3\n"), std::string::npos);
}

TEST(Heatmap, RejectsNonFinite) {
  RealField f(GridSpec(16), 1.0);
  f[5] = std::nan("");
  EXPECT_THROW(render_heatmap(f, scratch_dir("nan") / "x.pgm"), InvalidArgument);
}

TEST(SpectrumCsv, HeaderAndRows) {
  SpectrumTable t;
  t.entries.push_back({{1, 0}, 1.5, 1.75, true});
  t.entries.push_back({{2, -1}, 0.1, 0.1, false});
  EXPECT_EQ(spectrum_csv(t), "p,q_w,length,stage1_length,refined\n1,0,1.5,1.75,1\n2,-1,0.10000000000000001,0.10000000000000001,0\n");
}

TEST(Reports, VerificationJsonCarriesEveryCheck) {
  const auto sol = solve(HiggsData::constant(GridSpec(32), 2.0, 3.0));
  const auto fiber = fiber_metrics(quartic(sol.data));
  const auto j = to_json(verify(sol, fiber, calibrate_allowance(GridSpec(32))));
  EXPECT_EQ(j["pointwise"].size(), 9u);
  EXPECT_EQ(j["integrated"].size(), 2u);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["pointwise"][0]["check"], "u <= 1");
  EXPECT_TRUE(j["curvature"]["asserted_max_k_le_eps"].get<bool>());
}

#ifdef GOTHEN_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GOTHEN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  const auto dir = scratch_dir("cli");
  { std::ofstream(dir / "min.json") << kMinimal; }
  auto bad = Json::parse(kMinimal);
  bad["grid"]["bogus"] = 1;
  { std::ofstream(dir / "bad.json") << bad.dump(); }
  const std::string out = " --out " + (dir / "out").string();

  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("solve"), 2);
  EXPECT_EQ(run_cli("solve --config " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run_cli("solve --config " + (dir / "min.json").string() + out), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "solution.bin"));
  // nonconstant data violates the pointwise comparisons
  EXPECT_EQ(run_cli("check --sol " + (dir / "out" / "solution.bin").string() + out), 3);
  EXPECT_EQ(run_cli("gauge-test --config " + (dir / "min.json").string() + " --lambda 0.5,1.5" + out), 0);
  EXPECT_EQ(run_cli("gauge-test --config " + (dir / "min.json").string() + " --lambda 0,0" + out), 2);
  EXPECT_EQ(run_cli("report --dir " + (dir / "out").string()), 0);
  { std::ofstream(dir / "junk.bin") << "nope"; }
  EXPECT_EQ(run_cli("check --sol " + (dir / "junk.bin").string() + out), 1);

  const auto summary = read_json(dir / "out" / "solve_summary.json");
  EXPECT_EQ(summary["meta"]["command"], "solve");
  EXPECT_EQ(summary["meta"]["config"]["grid"]["n"], 32);
}
#endif
