// Command-line driver: subcommand picks the analysis, --config supplies a JSON
// file, and individual flags mirror config keys and override file values.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ptchain/run_config.hpp"

namespace {

using nlohmann::json;

struct Flags {
  std::string config_path;
  std::optional<int> n;
  std::optional<double> j, hz, gamma, gamma_max, tol, snap_tol;
  std::optional<std::string> boundary, family, plane, output_dir, prefix;
  std::optional<int> p, q, scan_points, jobs;
  std::optional<double> gamma_plus, gamma_minus;
  bool all_pairs = false, all_sites = false;
  std::vector<double> gamma_grid, hz_grid, gp_grid, gm_grid, hz_samples;
  std::vector<int> validate_sizes;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file (flags override its values)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--N", f.n, "number of spins (<= 14)");
  cmd->add_option("--J", f.j, "Ising coupling");
  cmd->add_option("--hz", f.hz, "transverse field (default 0)");
  cmd->add_option("--boundary", f.boundary, "open | periodic (default open)");
  cmd->add_option("--family", f.family, "none | plus | minus | double_plus | single_site");
  cmd->add_option("--p", f.p, "first perturbed site (1-based)");
  cmd->add_option("--q", f.q, "second perturbed site (two-site families)");
  cmd->add_option("--gamma-plus", f.gamma_plus, "single-site sigma+ strength");
  cmd->add_option("--gamma-minus", f.gamma_minus, "single-site sigma- strength");
  cmd->add_option("--gamma", f.gamma, "perturbation strength (spectrum)");
  cmd->add_flag("--all-pairs", f.all_pairs, "threshold: batch every (p,q) pair");
  cmd->add_flag("--all-sites", f.all_sites, "threshold: batch every single site");
  cmd->add_option("--gamma-max", f.gamma_max, "threshold search ceiling");
  cmd->add_option("--tol", f.tol, "bisection bracket width");
  cmd->add_option("--snap-tol", f.snap_tol, "relative imaginary-part snap");
  cmd->add_option("--scan-points", f.scan_points, "coarse scan resolution");
  cmd->add_option("--gamma-grid", f.gamma_grid, "flow / phase gamma axis: lo hi steps")
      ->expected(3);
  cmd->add_option("--hz-grid", f.hz_grid, "phase hz axis: lo hi steps")->expected(3);
  cmd->add_option("--gp-grid", f.gp_grid, "phase gamma_plus axis: lo hi steps")->expected(3);
  cmd->add_option("--gm-grid", f.gm_grid, "phase gamma_minus axis: lo hi steps")->expected(3);
  cmd->add_option("--plane", f.plane, "phase-diagram plane: gamma_pm | gamma_hz");
  cmd->add_option("--hz-samples", f.hz_samples, "field-response hz sample list");
  cmd->add_option("--validate-sizes", f.validate_sizes, "validate: chain sizes to sweep");
  cmd->add_option("--output-dir", f.output_dir, "output directory (default .)");
  cmd->add_option("--prefix", f.prefix, "output filename prefix");
  cmd->add_option("--jobs", f.jobs, "parallel grid cells")->envname("PTCHAIN_JOBS");
}

json grid_json(const std::vector<double>& v) {
  return json{{"lo", v[0]}, {"hi", v[1]}, {"steps", static_cast<int>(v[2])}};
}

// File config (if any) -> JSON object; every flag the user set overrides its
// key; the subcommand fixes "analysis". hz / boundary / pert fall back to
// 0 / open / none so pure-flag runs stay short.
std::string assemble(const Flags& f, const char* analysis) {
  json j = json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    if (!in) throw std::runtime_error("cannot read " + f.config_path);
    j = json::parse(buf.str());
    if (!j.is_object()) throw std::runtime_error("config file must hold a JSON object");
  }

  if (f.n) j["N"] = *f.n;
  if (f.j) j["J"] = *f.j;
  if (f.hz) j["hz"] = *f.hz;
  if (f.boundary) j["boundary"] = *f.boundary;
  if (!j.contains("hz")) j["hz"] = 0.0;
  if (!j.contains("boundary")) j["boundary"] = "open";

  if (f.family) {
    if (*f.family == "none") {
      j["pert"] = "none";
    } else {
      json pert = j.contains("pert") && j["pert"].is_object() ? j["pert"] : json::object();
      pert["family"] = *f.family;
      j["pert"] = pert;
    }
  }
  if (j.contains("pert") && j["pert"].is_object()) {
    if (f.p) j["pert"]["p"] = *f.p;
    if (f.q) j["pert"]["q"] = *f.q;
    if (f.gamma_plus) j["pert"]["gamma_plus"] = *f.gamma_plus;
    if (f.gamma_minus) j["pert"]["gamma_minus"] = *f.gamma_minus;
    // batch modes enumerate the sites themselves; fill placeholder indices so
    // --all-pairs / --all-sites need no explicit --p / --q
    if (f.all_pairs || f.all_sites) {
      if (!j["pert"].contains("p")) j["pert"]["p"] = 1;
      const bool two_site = j["pert"].value("family", "") != "single_site";
      if (two_site && !j["pert"].contains("q")) j["pert"]["q"] = f.all_pairs ? 2 : 1;
    }
    // the gamma_pm plane scans both strengths from the grids; only the site
    // matters, so missing strengths become placeholders
    std::string plane = "gamma_pm";
    if (f.plane)
      plane = *f.plane;
    else if (j.contains("plane") && j["plane"].is_string())
      plane = j["plane"].get<std::string>();
    const bool pm_plane = std::string(analysis) == "phase-diagram" && plane == "gamma_pm";
    if (pm_plane && j["pert"].value("family", "") == "single_site") {
      if (!j["pert"].contains("gamma_plus")) j["pert"]["gamma_plus"] = 0.0;
      if (!j["pert"].contains("gamma_minus")) j["pert"]["gamma_minus"] = 0.0;
    }
  }
  if (!j.contains("pert")) j["pert"] = "none";

  j["analysis"] = analysis;
  if (f.gamma) j["gamma"] = *f.gamma;
  if (f.all_pairs) j["all_pairs"] = true;
  if (f.all_sites) j["all_sites"] = true;
  if (f.gamma_max) j["gamma_max"] = *f.gamma_max;
  if (f.tol) j["tol"] = *f.tol;
  if (f.snap_tol) j["snap_tol"] = *f.snap_tol;
  if (f.scan_points) j["scan_points"] = *f.scan_points;
  if (!f.gamma_grid.empty()) j["gamma_grid"] = grid_json(f.gamma_grid);
  if (!f.hz_grid.empty()) j["hz_grid"] = grid_json(f.hz_grid);
  if (!f.gp_grid.empty()) j["gp_grid"] = grid_json(f.gp_grid);
  if (!f.gm_grid.empty()) j["gm_grid"] = grid_json(f.gm_grid);
  if (f.plane) j["plane"] = *f.plane;
  if (!f.hz_samples.empty()) j["hz_samples"] = f.hz_samples;
  if (!f.validate_sizes.empty()) j["validate_sizes"] = f.validate_sizes;
  if (f.output_dir) j["output_dir"] = *f.output_dir;
  if (f.prefix) j["prefix"] = *f.prefix;
  if (f.jobs) j["jobs"] = *f.jobs;
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-Hermitian spin-chain spectra, PT thresholds, and phase maps"};
  app.require_subcommand(1);

  static const std::pair<const char*, const char*> kinds[] = {
      {"spectrum", "full complex spectrum at one strength"},
      {"threshold", "PT-breaking threshold search (single or batch)"},
      {"flow", "eigenvalue flow along a gamma grid"},
      {"phase-diagram", "max imaginary part over a parameter plane"},
      {"field-response", "threshold vs transverse field with a line fit"},
      {"validate", "analytic vs numeric threshold cross-check"},
  };
  Flags flags;
  for (const auto& [name, help] : kinds) add_common(app.add_subcommand(name, help), flags);

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string analysis = app.get_subcommands().front()->get_name();
    const ptchain::RunConfig config = ptchain::parse_config(assemble(flags, analysis.c_str()));
    return ptchain::run(config);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
