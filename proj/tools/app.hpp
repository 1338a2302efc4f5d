#ifndef ROUGHCURVE_TOOLS_APP_HPP
#define ROUGHCURVE_TOOLS_APP_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "roughcurve/experiments.hpp"
#include "roughcurve/inference.hpp"

namespace roughcurve::app {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalError = 3 };

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> chains;
  std::optional<std::filesystem::path> out;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  int chains = 1;
  std::filesystem::path out = "out";
  int k = 0;
  double length_scale = 100.0;
  Interval support;
  GibbsConfig gibbs;
  double gamma = 0.95;
  bool write_u = false;

  std::vector<double> s_values;  // sample-prior

  double noise_level = 0.0;  // fit-signal, evidence
  double grid_lo = 0.75, grid_hi = 2.0, grid_step = 0.05;  // evidence

  CtConfig ct;
  InpaintConfig inpaint;
  std::filesystem::path mask_path;  // inpaint, optional
};

// Parses and validates; throws ConfigError naming the offending field.
ExperimentConfig load_config(const std::string& subcommand, const std::filesystem::path& path,
                             const Overrides& overrides);

// Runs a validated experiment and writes its artifacts; returns the output file names.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg);

// Full command line: roughcurve <subcommand> --config <path> [--seed S] [--chains N] [--out DIR].
int main_entry(int argc, char** argv);

}  // namespace roughcurve::app

#endif  // ROUGHCURVE_TOOLS_APP_HPP
