#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "roughcurve/errors.hpp"

using namespace roughcurve;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "roughcurve_test_cli";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const std::string& name, const json& j) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << j.dump();
  return p;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "roughcurve");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return app::main_entry(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

fs::path fresh(const std::string& name) {
  const fs::path out = workdir() / name;
  fs::remove_all(out);
  return out;
}

}  // namespace

TEST_CASE("config validation rejects bad input and writes nothing") {
  const std::vector<json> bad = {
      {{"k", 3}},
      {{"k", 16}, {"unknown_key", 1}},
      {{"noise_level", -0.1}},
      {{"n_samples", 100}, {"burn_in", 100}},
      {{"s_lo", 2.0}, {"s_hi", 1.0}},
      {{"u_kernel", "nuts"}},
      {{"experiment", "ct"}},
      {{"gamma", 1.5}},
      {{"nested", {{"a", 1}}}},
      {{"seed", "abc"}},
  };
  for (size_t i = 0; i < bad.size(); ++i) {
    const fs::path out = fresh("bad_" + std::to_string(i));
    const fs::path cfg = write_config("bad_" + std::to_string(i) + ".json", bad[i]);
    CHECK(run({"fit-signal", "--config", cfg.string(), "--out", out.string()}) == app::kConfigError);
    CHECK_FALSE(fs::exists(out));
  }
  const fs::path out = fresh("bad_json");
  std::ofstream(workdir() / "broken.json") << "{\"k\": ";
  CHECK(run({"fit-signal", "--config", (workdir() / "broken.json").string(), "--out", out.string()}) ==
        app::kConfigError);
  CHECK(run({"fit-signal", "--config", (workdir() / "nope.json").string(), "--out", out.string()}) ==
        app::kConfigError);
  CHECK(run({"frobnicate", "--config", "x.json"}) == app::kConfigError);
  CHECK(run({"fit-signal"}) == app::kConfigError);
  CHECK_FALSE(fs::exists(out));

  const fs::path ct_bad = write_config("ct_bad.json", {{"theta_max", 5.0}});
  CHECK(run({"ct", "--config", ct_bad.string(), "--out", out.string()}) == app::kConfigError);
  const fs::path gear_bad = write_config("gear_bad.json", {{"phantom", "gear"}, {"r_gear", 0.2}});
  CHECK(run({"inpaint", "--config", gear_bad.string(), "--out", out.string()}) == app::kConfigError);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("load_config error names the field") {
  const fs::path cfg = write_config("named.json", {{"pcn_beta", 2.0}});
  try {
    app::load_config("fit-signal", cfg, {});
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("pcn_beta") != std::string::npos);
  }
}

TEST_CASE("overrides take precedence") {
  const fs::path cfg = write_config("over.json", {{"seed", 4}, {"chains", 2}, {"out", "somewhere"}});
  app::Overrides o;
  o.seed = 9;
  o.out = workdir() / "elsewhere";
  const app::ExperimentConfig c = app::load_config("fit-signal", cfg, o);
  CHECK(c.seed == 9);
  CHECK(c.chains == 2);
  CHECK(c.out == workdir() / "elsewhere");
  CHECK(c.k == 256);
  CHECK(c.gibbs.u_kernel == UKernel::exact);
  CHECK(app::load_config("ct", write_config("ct.json", json::object()), {}).gibbs.u_kernel == UKernel::linearized);
}

TEST_CASE("sample-prior writes one curve per s") {
  const fs::path out = fresh("prior");
  const fs::path cfg = write_config("prior.json", {{"k", 32}, {"s_values", {0.5, 2.0}}});
  REQUIRE(run({"sample-prior", "--config", cfg.string(), "--out", out.string(), "--seed", "3"}) == app::kOk);
  CHECK(fs::exists(out / "v_s0.5.csv"));
  CHECK(fs::exists(out / "v_s2.csv"));
  const json s = read_json(out / "summary.json");
  CHECK(s["curves"].size() == 2);
  CHECK(s["curves"][0]["mean_sq_first_difference"].get<double>() > s["curves"][1]["mean_sq_first_difference"].get<double>());
}

TEST_CASE("fit-signal outputs and byte-identical reruns") {
  const json j = {{"k", 16}, {"n_samples", 600}, {"burn_in", 200}, {"write_u", true}};
  const fs::path cfg = write_config("fit.json", j);
  const fs::path a = fresh("fit_a"), b = fresh("fit_b");
  REQUIRE(run({"fit-signal", "--config", cfg.string(), "--out", a.string(), "--seed", "11"}) == app::kOk);
  REQUIRE(run({"fit-signal", "--config", cfg.string(), "--out", b.string(), "--seed", "11"}) == app::kOk);
  for (const char* f : {"chain.csv", "mean_v.csv", "hdi.csv"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const json s = read_json(a / "summary.json");
  CHECK(s["n_kept"].get<int>() == 400);
  CHECK(s["relative_error"].get<double>() < 0.5);
  CHECK(s.contains("s_hdi"));
  CHECK(s.contains("ess"));
  std::ifstream chain(a / "chain.csv");
  std::string header;
  std::getline(chain, header);
  CHECK(header.rfind("chain,iteration,s,", 0) == 0);
  CHECK(header.find(",u32") != std::string::npos);

  const fs::path c = fresh("fit_c");
  REQUIRE(run({"fit-signal", "--config", cfg.string(), "--out", c.string(), "--seed", "12"}) == app::kOk);
  CHECK(slurp(a / "chain.csv") != slurp(c / "chain.csv"));
}

TEST_CASE("multiple chains") {
  const fs::path cfg = write_config("chains.json", {{"k", 8}, {"n_samples", 300}, {"burn_in", 100}});
  const fs::path out = fresh("chains");
  REQUIRE(run({"fit-signal", "--config", cfg.string(), "--out", out.string(), "--chains", "2"}) == app::kOk);
  CHECK(fs::exists(out / "chain_0.csv"));
  CHECK(fs::exists(out / "chain_1.csv"));
  const json s = read_json(out / "summary.json");
  CHECK(s["per_chain"].size() == 2);
  CHECK(s["n_kept"].get<int>() == 400);
}

TEST_CASE("evidence outputs") {
  const fs::path cfg = write_config("ev.json", {{"k", 16},
                                                {"n_samples", 400},
                                                {"burn_in", 100},
                                                {"s_grid_lo", 0.5},
                                                {"s_grid_hi", 1.0},
                                                {"s_grid_step", 0.25}});
  const fs::path out = fresh("ev");
  REQUIRE(run({"evidence", "--config", cfg.string(), "--out", out.string()}) == app::kOk);
  CHECK(fs::exists(out / "evidence.csv"));
  const json s = read_json(out / "summary.json");
  const double arg = s["evidence_argmax_s"].get<double>();
  CHECK((arg == 0.5 || arg == 0.75 || arg == 1.0));
}

TEST_CASE("ct outputs") {
  const fs::path cfg = write_config("ct_small.json", {{"k", 8},
                                                      {"grid_n", 16},
                                                      {"n_angles", 8},
                                                      {"n_detectors", 16},
                                                      {"n_samples", 300},
                                                      {"burn_in", 100}});
  const fs::path a = fresh("ct_a"), b = fresh("ct_b");
  REQUIRE(run({"ct", "--config", cfg.string(), "--out", a.string()}) == app::kOk);
  REQUIRE(run({"ct", "--config", cfg.string(), "--out", b.string()}) == app::kOk);
  for (const char* f : {"chain.csv", "mean_v.csv", "hdi.csv", "sinogram.csv", "truth.pgm", "posterior_mean.pgm"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const json s = read_json(a / "summary.json");
  CHECK(s.contains("radial_coverage"));
}

TEST_CASE("inpaint outputs, with a mask file") {
  Mask mask = Mask::Constant(16, 16, true);
  mask.middleRows(6, 2).setConstant(false);
  const fs::path mask_path = workdir() / "mask.csv";
  std::ofstream mf(mask_path);
  mf << "16,16\n";
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) mf << int(mask(r, c)) << (c == 15 ? "\n" : ",");
  mf.close();
  const fs::path cfg = write_config("inp_small.json", {{"k", 8},
                                                       {"grid_n", 16},
                                                       {"mask", mask_path.string()},
                                                       {"phantom", "blob"},
                                                       {"noise", "laplace"},
                                                       {"n_samples", 300},
                                                       {"burn_in", 100}});
  const fs::path out = fresh("inp");
  REQUIRE(run({"inpaint", "--config", cfg.string(), "--out", out.string()}) == app::kOk);
  for (const char* f : {"chain.csv", "mean_v.csv", "hdi.csv", "observed.pgm", "truth.pgm", "posterior_mean.pgm"})
    CHECK(fs::exists(out / f));
  const json s = read_json(out / "summary.json");
  CHECK(s["noise"] == "laplace");

  const fs::path wrong = write_config("inp_wrong.json", {{"grid_n", 32}, {"mask", mask_path.string()}});
  CHECK(run({"inpaint", "--config", wrong.string(), "--out", fresh("inp_wrong").string()}) == app::kConfigError);
  CHECK_FALSE(fs::exists(workdir() / "inp_wrong"));
}

TEST_CASE("installed binary exit codes") {
  const fs::path cfg = write_config("exit.json", {{"k", 5}});
  const fs::path out = fresh("exit");
  const std::string cmd = std::string("\"") + ROUGHCURVE_CLI_PATH + "\" fit-signal --config \"" + cfg.string() +
                          "\" --out \"" + out.string() + "\" > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
  CHECK_FALSE(fs::exists(out));
}
