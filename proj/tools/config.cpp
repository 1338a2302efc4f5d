#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "app.hpp"
#include "roughcurve/errors.hpp"
#include "roughcurve/io.hpp"

namespace roughcurve::app {

namespace {

using nlohmann::json;

const std::set<std::string> kCommon = {"experiment", "seed",      "chains",      "out",           "k",
                                       "length_scale", "s_lo",    "s_hi",        "n_samples",     "burn_in",
                                       "pcn_beta",   "mh_step",   "adapt",       "u_kernel",      "pcn_steps",
                                       "centered_s", "centered_step", "reference_interval", "fd_step", "gamma",
                                       "write_u"};
const std::set<std::string> kShape = {"phantom", "s_true", "r_gear", "n_teeth", "r0", "b0", "alpha_in",
                                      "alpha_out", "smooth_width", "grid_n", "extent", "noise", "noise_level",
                                      "noise_sigma"};

std::set<std::string> allowed_keys(const std::string& experiment) {
  std::set<std::string> keys = kCommon;
  auto add = [&](std::initializer_list<std::string> extra) { keys.insert(extra.begin(), extra.end()); };
  if (experiment == "sample-prior") add({"s_values"});
  if (experiment == "fit-signal") add({"noise_level"});
  if (experiment == "evidence") add({"noise_level", "s_grid_lo", "s_grid_hi", "s_grid_step"});
  if (experiment == "ct" || experiment == "inpaint") keys.insert(kShape.begin(), kShape.end());
  if (experiment == "ct") add({"theta_max", "n_angles", "n_detectors", "detector_span"});
  if (experiment == "inpaint") add({"mask", "n_stripes", "stripe_width"});
  return keys;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

class Fields {
 public:
  explicit Fields(const json& j) : j_(j) {}

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    if (!j_[key].is_number()) fail(key, "expected a number");
    return j_[key].get<double>();
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    if (!j_[key].is_number_integer() && !j_[key].is_number_unsigned()) fail(key, "expected an integer");
    return j_[key].get<long long>();
  }

  int small_int(const std::string& key, int fallback) const {
    const long long v = integer(key, fallback);
    if (v < -1000000000LL || v > 1000000000LL) fail(key, "integer out of range");
    return static_cast<int>(v);
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_[key].is_boolean()) fail(key, "expected true or false");
    return j_[key].get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!j_[key].is_string()) fail(key, "expected a string");
    return j_[key].get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) const {
    if (!has(key)) return {};
    if (!j_[key].is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : j_[key]) {
      if (!x.is_number()) fail(key, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

 private:
  const json& j_;
};

// Runs a library validator, reporting its message against a config field.
template <typename F>
void check(const std::string& field, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  } catch (const std::domain_error& e) {
    fail(field, e.what());
  } catch (const std::runtime_error& e) {
    fail(field, e.what());
  }
}

struct ExperimentDefaults {
  int k;
  int n_samples;
  int burn_in;
  double gamma;
  UKernel kernel;
  double noise_level;
};

ExperimentDefaults defaults_for(const std::string& experiment) {
  if (experiment == "sample-prior") return {128, 1, 0, 0.95, UKernel::pcn, 0.0};
  if (experiment == "fit-signal") return {256, 20000, 5000, 0.95, UKernel::exact, 0.01};
  if (experiment == "evidence") return {256, 20000, 5000, 0.95, UKernel::exact, 0.1};
  if (experiment == "ct") return {64, 10000, 2000, 0.99, UKernel::linearized, 0.01};
  return {128, 10000, 2000, 0.99, UKernel::linearized, 0.02};
}

UKernel parse_kernel(const std::string& name) {
  if (name == "pcn") return UKernel::pcn;
  if (name == "exact") return UKernel::exact;
  if (name == "linearized") return UKernel::linearized;
  fail("u_kernel", "expected one of pcn, exact, linearized");
}

NoiseKind parse_noise(const std::string& name) {
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "laplace") return NoiseKind::laplace;
  fail("noise", "expected gaussian or laplace");
}

PhantomKind parse_phantom(const std::string& name) {
  if (name == "blob") return PhantomKind::blob;
  if (name == "gear") return PhantomKind::gear;
  fail("phantom", "expected blob or gear");
}

// Shape, phantom, grid, and noise keys shared by the imaging experiments.
void read_imaging(const Fields& f, StarShape& shape, ImageGrid& grid, double& smooth_width, PhantomConfig& phantom,
                  NoiseSpec& noise, double length_scale) {
  shape.r0 = f.number("r0", shape.r0);
  shape.b0 = f.number("b0", shape.b0);
  shape.alpha_in = f.number("alpha_in", shape.alpha_in);
  shape.alpha_out = f.number("alpha_out", shape.alpha_out);
  check("r0", [&] { shape.validate(); });
  grid.n = f.small_int("grid_n", grid.n);
  grid.extent = f.number("extent", grid.extent);
  check("grid_n", [&] { grid.validate(); });
  smooth_width = f.number("smooth_width", smooth_width);
  phantom.kind = parse_phantom(f.text("phantom", phantom.kind == PhantomKind::blob ? "blob" : "gear"));
  phantom.s_true = f.number("s_true", phantom.s_true);
  phantom.length_scale = length_scale;
  phantom.r_gear = f.number("r_gear", phantom.r_gear);
  phantom.n_teeth = f.small_int("n_teeth", phantom.n_teeth);
  if (phantom.kind == PhantomKind::blob && !(phantom.s_true > 0)) fail("s_true", "must be positive");
  if (phantom.kind == PhantomKind::gear) {
    if (phantom.n_teeth < 1) fail("n_teeth", "must be positive");
    if (!(phantom.r_gear * 0.9 > shape.r0)) fail("r_gear", "gear radius must stay above r0 at every angle");
  }
  noise.kind = parse_noise(f.text("noise", noise.kind == NoiseKind::gaussian ? "gaussian" : "laplace"));
  if (f.has("noise_sigma") && f.has("noise_level")) fail("noise_sigma", "give either noise_level or noise_sigma");
  if (f.has("noise_sigma")) {
    noise.relative = 0.0;
    noise.sigma = f.number("noise_sigma", 0.0);
    if (!(noise.sigma > 0)) fail("noise_sigma", "must be positive");
  } else {
    noise.relative = f.number("noise_level", noise.relative);
    if (!(noise.relative > 0)) fail("noise_level", "must be positive");
  }
}

}  // namespace

ExperimentConfig load_config(const std::string& subcommand, const std::filesystem::path& path,
                             const Overrides& overrides) {
  static const std::set<std::string> kExperiments = {"sample-prior", "fit-signal", "ct", "inpaint", "evidence"};
  if (!kExperiments.count(subcommand)) throw ConfigError("unknown subcommand '" + subcommand + "'");

  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");

  const std::set<std::string> allowed = allowed_keys(subcommand);
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) fail(item.key(), "not used by experiment " + subcommand);
    if (item.value().is_object()) fail(item.key(), "nested objects are not supported");
  }

  const Fields f(j);
  ExperimentConfig cfg;
  cfg.experiment = f.text("experiment", subcommand);
  if (cfg.experiment != subcommand) fail("experiment", "'" + cfg.experiment + "' does not match the subcommand");

  const ExperimentDefaults def = defaults_for(subcommand);
  const long long seed = overrides.seed ? static_cast<long long>(*overrides.seed) : f.integer("seed", 0);
  if (seed < 0) fail("seed", "must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.chains = overrides.chains ? *overrides.chains : f.small_int("chains", 1);
  if (cfg.chains < 1 || cfg.chains > 256) fail("chains", "must lie in [1, 256]");
  cfg.out = overrides.out ? *overrides.out : std::filesystem::path(f.text("out", "out"));
  if (cfg.out.empty()) fail("out", "must not be empty");
  if (std::filesystem::exists(cfg.out) && !std::filesystem::is_directory(cfg.out))
    fail("out", cfg.out.string() + " exists and is not a directory");

  cfg.k = f.small_int("k", def.k);
  check("k", [&] { KLConfig{cfg.k, 1.0}.validate(); });
  cfg.length_scale = f.number("length_scale", 100.0);
  if (!(cfg.length_scale > 0)) fail("length_scale", "must be positive");
  cfg.support.lo = f.number("s_lo", 0.0);
  cfg.support.hi = f.number("s_hi", 10.0);
  if (!(cfg.support.lo >= 0)) fail("s_lo", "must be nonnegative");
  if (!(cfg.support.hi > cfg.support.lo)) fail("s_hi", "must exceed s_lo");

  GibbsConfig& g = cfg.gibbs;
  g.n_samples = f.small_int("n_samples", def.n_samples);
  g.burn_in = f.small_int("burn_in", def.burn_in);
  if (g.n_samples < 1) fail("n_samples", "must be positive");
  if (g.burn_in < 0 || g.burn_in >= g.n_samples) fail("burn_in", "must satisfy 0 <= burn_in < n_samples");
  g.pcn_beta = f.number("pcn_beta", g.pcn_beta);
  g.mh_step = f.number("mh_step", g.mh_step);
  g.adapt = f.boolean("adapt", g.adapt);
  g.u_kernel = f.has("u_kernel") ? parse_kernel(f.text("u_kernel", "")) : def.kernel;
  g.pcn_steps = f.small_int("pcn_steps", g.pcn_steps);
  g.centered_s = f.boolean("centered_s", g.centered_s);
  g.centered_step = f.number("centered_step", g.centered_step);
  g.reference_interval = f.small_int("reference_interval", g.reference_interval);
  g.fd_step = f.number("fd_step", g.fd_step);
  g.seed = cfg.seed;
  check("n_samples", [&] { g.validate(); });
  cfg.gamma = f.number("gamma", def.gamma);
  if (!(cfg.gamma > 0 && cfg.gamma < 1)) fail("gamma", "must lie in (0, 1)");
  cfg.write_u = f.boolean("write_u", false);

  if (subcommand == "sample-prior") {
    cfg.s_values = f.has("s_values") ? f.numbers("s_values") : std::vector<double>{0.1, 0.5, 1.0, 2.0};
    if (cfg.s_values.empty()) fail("s_values", "must not be empty");
    for (double s : cfg.s_values)
      if (!(s > 0) || !std::isfinite(s)) fail("s_values", "every s must be positive and finite");
  }
  if (subcommand == "fit-signal" || subcommand == "evidence") {
    cfg.noise_level = f.number("noise_level", def.noise_level);
    if (!(cfg.noise_level > 0)) fail("noise_level", "must be positive");
  }
  if (subcommand == "evidence") {
    cfg.grid_lo = f.number("s_grid_lo", cfg.grid_lo);
    cfg.grid_hi = f.number("s_grid_hi", cfg.grid_hi);
    cfg.grid_step = f.number("s_grid_step", cfg.grid_step);
    if (!(cfg.grid_lo > 0)) fail("s_grid_lo", "must be positive");
    if (!(cfg.grid_hi >= cfg.grid_lo)) fail("s_grid_hi", "must be at least s_grid_lo");
    if (!(cfg.grid_step > 0)) fail("s_grid_step", "must be positive");
    if ((cfg.grid_hi - cfg.grid_lo) / cfg.grid_step > 1e6) fail("s_grid_step", "grid has too many points");
  }
  if (subcommand == "ct") {
    CtConfig& c = cfg.ct;
    c.k = cfg.k;
    c.noise.relative = def.noise_level;
    read_imaging(f, c.shape, c.grid, c.smooth_width, c.phantom, c.noise, cfg.length_scale);
    c.scan.theta_max = f.number("theta_max", c.scan.theta_max);
    c.scan.n_angles = f.small_int("n_angles", c.scan.n_angles);
    c.scan.n_detectors = f.small_int("n_detectors", c.scan.n_detectors);
    c.scan.detector_span = f.number("detector_span", c.scan.detector_span);
    check("theta_max", [&] { c.scan.validate(); });
    if (KLConfig{cfg.k, 1.0}.m() < 4) fail("k", "imaging needs at least four boundary nodes");
  }
  if (subcommand == "inpaint") {
    InpaintConfig& c = cfg.inpaint;
    c.k = cfg.k;
    c.noise.relative = def.noise_level;
    read_imaging(f, c.shape, c.grid, c.smooth_width, c.phantom, c.noise, cfg.length_scale);
    c.n_stripes = f.small_int("n_stripes", c.n_stripes);
    c.stripe_width = f.small_int("stripe_width", c.stripe_width);
    if (f.has("mask")) {
      cfg.mask_path = f.text("mask", "");
      Mask mask;
      check("mask", [&] { mask = io::read_mask(cfg.mask_path); });
      if (mask.rows() != c.grid.n || mask.cols() != c.grid.n)
        fail("mask", "mask is " + std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()) +
                         " but grid_n is " + std::to_string(c.grid.n));
    } else {
      check("n_stripes", [&] { stripe_mask(c.grid.n, c.n_stripes, c.stripe_width); });
    }
  }
  return cfg;
}

}  // namespace roughcurve::app
