#include "ptchain/run_config.hpp"

#include <json.hpp>

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

#include "fmt_util.hpp"

namespace ptchain {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

const json& need(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing required key \"") + key + "\"");
  return *it;
}

double as_number(const json& j, const char* key) {
  if (!j.is_number()) bad(std::string("key \"") + key + "\" expects a number");
  return j.get<double>();
}

int as_int(const json& j, const char* key) {
  if (!j.is_number_integer()) bad(std::string("key \"") + key + "\" expects an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const char* key) {
  if (!j.is_boolean()) bad(std::string("key \"") + key + "\" expects a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const char* key) {
  if (!j.is_string()) bad(std::string("key \"") + key + "\" expects a string");
  return j.get<std::string>();
}

GridSpec as_grid(const json& j, const char* key) {
  if (!j.is_object()) bad(std::string("key \"") + key + "\" expects {lo, hi, steps}");
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (k != "lo" && k != "hi" && k != "steps")
      bad(std::string("unknown key \"") + k + "\" inside \"" + key + "\"");
  }
  GridSpec g;
  g.lo = as_number(need(j, "lo"), "lo");
  g.hi = as_number(need(j, "hi"), "hi");
  g.steps = as_int(need(j, "steps"), "steps");
  if (!std::isfinite(g.lo) || !std::isfinite(g.hi)) bad(std::string(key) + ": bounds must be finite");
  if (g.steps < 1) bad(std::string(key) + ": steps must be >= 1");
  if (g.steps == 1 && g.lo != g.hi) bad(std::string(key) + ": steps = 1 needs lo = hi");
  if (g.hi < g.lo) bad(std::string(key) + ": hi must be >= lo");
  return g;
}

std::vector<double> as_ascending(const json& j, const char* key) {
  if (!j.is_array() || j.empty()) bad(std::string("key \"") + key + "\" expects a nonempty array");
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) bad(std::string("key \"") + key + "\" expects numbers");
    v.push_back(e.get<double>());
    if (!std::isfinite(v.back())) bad(std::string(key) + ": entries must be finite");
  }
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) bad(std::string(key) + ": entries must be strictly ascending");
  return v;
}

PerturbationSpec parse_pert(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "none") return NoPerturbation{};
    bad("key \"pert\" expects \"none\" or an object {family, p, q | gamma_plus, gamma_minus}");
  }
  if (!j.is_object()) bad("key \"pert\" expects \"none\" or an object");
  static const std::set<std::string> allowed{"family", "p", "q", "gamma_plus", "gamma_minus"};
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (!allowed.count(k)) bad(std::string("unknown key \"") + k + "\" inside \"pert\"");
  }
  const std::string family = as_string(need(j, "family"), "family");
  const auto reject = [&](const char* key) {
    if (j.contains(key))
      bad(std::string("key \"") + key + "\" does not apply to pert family \"" + family + "\"");
  };
  if (family == "single_site") {
    reject("q");
    SingleSite s;
    s.p = as_int(need(j, "p"), "p");
    s.gamma_plus = as_number(need(j, "gamma_plus"), "gamma_plus");
    s.gamma_minus = as_number(need(j, "gamma_minus"), "gamma_minus");
    return s;
  }
  reject("gamma_plus");
  reject("gamma_minus");
  const int p = as_int(need(j, "p"), "p");
  const int q = as_int(need(j, "q"), "q");
  if (family == "plus") return TwoSitePlus{p, q};
  if (family == "minus") return TwoSiteMinus{p, q};
  if (family == "double_plus") return TwoSiteDoublePlus{p, q};
  bad("pert family \"" + family + "\" is not one of plus | minus | double_plus | single_site");
}

json pert_to_json(const PerturbationSpec& pert) {
  if (std::holds_alternative<NoPerturbation>(pert)) return json("none");
  json j = json::object();
  if (const auto* t = std::get_if<TwoSitePlus>(&pert)) {
    j["family"] = "plus";
    j["p"] = t->p;
    j["q"] = t->q;
  } else if (const auto* t = std::get_if<TwoSiteMinus>(&pert)) {
    j["family"] = "minus";
    j["p"] = t->p;
    j["q"] = t->q;
  } else if (const auto* t = std::get_if<TwoSiteDoublePlus>(&pert)) {
    j["family"] = "double_plus";
    j["p"] = t->p;
    j["q"] = t->q;
  } else {
    const auto& s = std::get<SingleSite>(pert);
    j["family"] = "single_site";
    j["p"] = s.p;
    j["gamma_plus"] = s.gamma_plus;
    j["gamma_minus"] = s.gamma_minus;
  }
  return j;
}

json grid_to_json(const GridSpec& g) {
  return json{{"lo", g.lo}, {"hi", g.hi}, {"steps", g.steps}};
}

Analysis parse_analysis(const std::string& s) {
  if (s == "spectrum") return Analysis::Spectrum;
  if (s == "threshold") return Analysis::Threshold;
  if (s == "flow") return Analysis::Flow;
  if (s == "phase-diagram") return Analysis::PhaseGrid;
  if (s == "field-response") return Analysis::FieldResponse;
  if (s == "validate") return Analysis::Validate;
  bad("analysis \"" + s +
      "\" is not one of spectrum | threshold | flow | phase-diagram | field-response | validate");
}

}  // namespace

const char* to_string(Analysis a) {
  switch (a) {
    case Analysis::Spectrum: return "spectrum";
    case Analysis::Threshold: return "threshold";
    case Analysis::Flow: return "flow";
    case Analysis::PhaseGrid: return "phase-diagram";
    case Analysis::FieldResponse: return "field-response";
    case Analysis::Validate: return "validate";
  }
  return "?";
}

const char* to_string(PhasePlane p) {
  switch (p) {
    case PhasePlane::GammaPm: return "gamma_pm";
    case PhasePlane::GammaHz: return "gamma_hz";
  }
  return "?";
}

std::vector<double> GridSpec::points() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) {
    v.push_back(lo);
    return v;
  }
  for (int i = 0; i < steps; ++i)
    v.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
  return v;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("top level must be a JSON object");

  static const std::set<std::string> allowed{
      "N",          "J",          "hz",        "boundary", "pert",           "analysis",
      "gamma",      "all_pairs",  "all_sites", "gamma_max", "tol",           "snap_tol",
      "scan_points", "gamma_grid", "hz_grid",   "gp_grid",  "gm_grid",       "plane",
      "hz_samples", "validate_sizes", "output_dir", "prefix", "jobs"};
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (!allowed.count(k)) bad(std::string("unknown key \"") + k + "\"");
  }

  RunConfig c;
  c.chain.n_sites = as_int(need(j, "N"), "N");
  c.chain.coupling_j = as_number(need(j, "J"), "J");
  c.chain.field_hz = as_number(need(j, "hz"), "hz");
  const std::string boundary = as_string(need(j, "boundary"), "boundary");
  if (boundary == "open")
    c.chain.boundary = Boundary::Open;
  else if (boundary == "periodic")
    c.chain.boundary = Boundary::Periodic;
  else
    bad("boundary \"" + boundary + "\" is not one of open | periodic");
  validate(c.chain);
  if (c.chain.n_sites > 14)
    bad("N = " + std::to_string(c.chain.n_sites) +
        " exceeds the dense-matrix cap (N <= 14, a 16384 x 16384 matrix)");

  c.perturbation = parse_pert(need(j, "pert"));
  validate(c.chain, c.perturbation);
  c.analysis = parse_analysis(as_string(need(j, "analysis"), "analysis"));

  if (j.contains("gamma")) {
    c.gamma = as_number(j["gamma"], "gamma");
    if (!(c.gamma >= 0.0) || !std::isfinite(c.gamma)) bad("gamma must be finite and >= 0");
  }
  if (j.contains("all_pairs")) c.all_pairs = as_bool(j["all_pairs"], "all_pairs");
  if (j.contains("all_sites")) c.all_sites = as_bool(j["all_sites"], "all_sites");
  if (c.all_pairs && c.all_sites) bad("all_pairs and all_sites are mutually exclusive");

  c.threshold = default_threshold_settings(c.chain);
  if (j.contains("gamma_max")) c.threshold.gamma_max = as_number(j["gamma_max"], "gamma_max");
  if (j.contains("tol")) c.threshold.tol = as_number(j["tol"], "tol");
  if (j.contains("snap_tol")) c.threshold.snap_tol = as_number(j["snap_tol"], "snap_tol");
  if (j.contains("scan_points")) c.threshold.scan_points = as_int(j["scan_points"], "scan_points");
  if (!(c.threshold.gamma_max > 0.0)) bad("gamma_max must be > 0");
  if (!(c.threshold.tol > 0.0)) bad("tol must be > 0");
  if (!(c.threshold.snap_tol >= 0.0)) bad("snap_tol must be >= 0");
  if (c.threshold.scan_points < 1) bad("scan_points must be >= 1");

  const double scale = c.chain.coupling_j > 0.0 ? c.chain.coupling_j : 1.0;
  c.gamma_grid = {0.0, c.threshold.gamma_max, 33};
  if (j.contains("gamma_grid")) c.gamma_grid = as_grid(j["gamma_grid"], "gamma_grid");
  c.hz_grid = {0.0, 0.5 * scale, 17};
  if (j.contains("hz_grid")) c.hz_grid = as_grid(j["hz_grid"], "hz_grid");
  c.gp_grid = {-scale, scale, 41};
  if (j.contains("gp_grid")) c.gp_grid = as_grid(j["gp_grid"], "gp_grid");
  c.gm_grid = {-scale, scale, 41};
  if (j.contains("gm_grid")) c.gm_grid = as_grid(j["gm_grid"], "gm_grid");

  if (j.contains("plane")) {
    const std::string plane = as_string(j["plane"], "plane");
    if (plane == "gamma_pm")
      c.plane = PhasePlane::GammaPm;
    else if (plane == "gamma_hz")
      c.plane = PhasePlane::GammaHz;
    else
      bad("plane \"" + plane + "\" is not one of gamma_pm | gamma_hz");
  }

  c.hz_samples = {0.02 * scale, 0.05 * scale, 0.08 * scale};
  if (j.contains("hz_samples")) c.hz_samples = as_ascending(j["hz_samples"], "hz_samples");

  c.validate_sizes = {c.chain.n_sites};
  if (j.contains("validate_sizes")) {
    const auto& arr = j["validate_sizes"];
    if (!arr.is_array() || arr.empty()) bad("key \"validate_sizes\" expects a nonempty array");
    c.validate_sizes.clear();
    for (const auto& e : arr) {
      c.validate_sizes.push_back(as_int(e, "validate_sizes"));
      if (c.validate_sizes.back() < 1 || c.validate_sizes.back() > 14)
        bad("validate_sizes entries must be in [1, 14]");
    }
  }

  if (j.contains("output_dir")) c.output_dir = as_string(j["output_dir"], "output_dir");
  if (c.output_dir.empty()) bad("output_dir must be nonempty");
  if (j.contains("prefix")) c.prefix = as_string(j["prefix"], "prefix");
  if (j.contains("jobs")) {
    c.jobs = as_int(j["jobs"], "jobs");
    if (c.jobs < 1) bad("jobs must be >= 1");
  }

  // analysis-specific coherence
  const bool is_two_site = std::holds_alternative<TwoSitePlus>(c.perturbation) ||
                           std::holds_alternative<TwoSiteMinus>(c.perturbation) ||
                           std::holds_alternative<TwoSiteDoublePlus>(c.perturbation);
  const bool is_none = std::holds_alternative<NoPerturbation>(c.perturbation);
  switch (c.analysis) {
    case Analysis::Spectrum:
      if (!is_none && !j.contains("gamma"))
        bad("spectrum with a perturbation needs an explicit gamma");
      break;
    case Analysis::Threshold:
      if (is_none && !c.all_pairs && !c.all_sites)
        bad("threshold analysis needs a perturbation (or all_pairs / all_sites)");
      if (c.all_pairs && !is_two_site)
        bad("all_pairs batches a two-site family; set pert to plus | minus | double_plus");
      break;
    case Analysis::Flow:
      if (is_none) bad("flow analysis needs a perturbation");
      break;
    case Analysis::PhaseGrid:
      if (c.plane == PhasePlane::GammaPm && !std::holds_alternative<SingleSite>(c.perturbation))
        bad("plane gamma_pm sweeps a single-site perturbation; set pert family single_site");
      if (c.plane == PhasePlane::GammaHz && is_none)
        bad("plane gamma_hz needs a perturbation");
      break;
    case Analysis::FieldResponse:
      if (is_none) bad("field-response analysis needs a perturbation");
      if (!(c.hz_samples.front() > 0.0)) bad("hz_samples must be positive");
      if (c.hz_samples.size() < 2) bad("hz_samples needs at least two entries");
      break;
    case Analysis::Validate: break;
  }
  return c;
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["N"] = c.chain.n_sites;
  j["J"] = c.chain.coupling_j;
  j["hz"] = c.chain.field_hz;
  j["boundary"] = c.chain.boundary == Boundary::Open ? "open" : "periodic";
  j["pert"] = pert_to_json(c.perturbation);
  j["analysis"] = to_string(c.analysis);
  j["gamma"] = c.gamma;
  j["all_pairs"] = c.all_pairs;
  j["all_sites"] = c.all_sites;
  j["gamma_max"] = c.threshold.gamma_max;
  j["tol"] = c.threshold.tol;
  j["snap_tol"] = c.threshold.snap_tol;
  j["scan_points"] = c.threshold.scan_points;
  j["gamma_grid"] = grid_to_json(c.gamma_grid);
  j["hz_grid"] = grid_to_json(c.hz_grid);
  j["gp_grid"] = grid_to_json(c.gp_grid);
  j["gm_grid"] = grid_to_json(c.gm_grid);
  j["plane"] = to_string(c.plane);
  j["hz_samples"] = c.hz_samples;
  j["validate_sizes"] = c.validate_sizes;
  j["output_dir"] = c.output_dir;
  j["prefix"] = c.prefix;
  j["jobs"] = c.jobs;
  return j.dump(2) + "\n";
}

}  // namespace ptchain
