#pragma once

#include <string>
#include <vector>

#include "ptchain/model.hpp"
#include "ptchain/pt.hpp"

namespace ptchain {

enum class Analysis { Spectrum, Threshold, Flow, PhaseGrid, FieldResponse, Validate };
enum class PhasePlane { GammaPm, GammaHz };

const char* to_string(Analysis a);
const char* to_string(PhasePlane p);

// Uniform grid: steps points from lo to hi inclusive (steps = 1 -> just lo).
struct GridSpec {
  double lo = 0.0, hi = 0.0;
  int steps = 1;

  std::vector<double> points() const;
  bool operator==(const GridSpec&) const = default;
};

// One fully resolved run. parse_config fills every default, so two configs
// compare equal iff they describe identical runs.
struct RunConfig {
  SpinChainConfig chain;
  PerturbationSpec perturbation = NoPerturbation{};
  Analysis analysis = Analysis::Spectrum;

  double gamma = 0.0;                 // spectrum: perturbation strength
  bool all_pairs = false;             // threshold: batch over all (p,q)
  bool all_sites = false;             // threshold: batch over all single sites
  ThresholdSettings threshold;        // threshold / field-response / validate
  GridSpec gamma_grid;                // flow / phase-diagram (gamma_hz plane)
  GridSpec hz_grid;                   // phase-diagram (gamma_hz plane)
  GridSpec gp_grid, gm_grid;          // phase-diagram (gamma_pm plane)
  PhasePlane plane = PhasePlane::GammaPm;
  std::vector<double> hz_samples;     // field-response
  std::vector<int> validate_sizes;    // validate: chain sizes to sweep
  std::string output_dir = ".";
  std::string prefix;                 // prepended to every output filename
  int jobs = 1;

  bool operator==(const RunConfig&) const = default;
};

// Strict JSON -> RunConfig. Unknown keys, wrong types, out-of-range sites,
// missing keys required by the chosen analysis: std::invalid_argument naming
// the offending key. Defaults (tolerances, jobs, validate sizes) are resolved
// here so the result is self-contained.
RunConfig parse_config(const std::string& text);

// Canonical JSON with every field spelled out; parse_config(serialize_config(c))
// reproduces c exactly.
std::string serialize_config(const RunConfig& config);

// Executes the analysis: writes {prefix}<analysis>.csv and {prefix}manifest.json
// under output_dir, prints a short summary to stdout. Returns 0 on success,
// 1 on config/domain errors, 2 on numeric failure, 3 on I/O failure.
int run(const RunConfig& config);

}  // namespace ptchain
