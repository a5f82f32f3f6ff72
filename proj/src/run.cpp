#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fmt_util.hpp"
#include "ptchain/analytic.hpp"
#include "ptchain/eig.hpp"
#include "ptchain/model.hpp"
#include "ptchain/pt.hpp"
#include "ptchain/run_config.hpp"

namespace ptchain {

using nlohmann::json;

namespace {

// Energies go out in units of J when J > 0 (column suffix _over_J), raw
// otherwise. The manifest always records raw values next to the full config.
struct EnergyFmt {
  double j = 0.0;
  bool scaled() const { return j > 0.0; }
  std::string cell(double v) const { return fmt_g(scaled() ? v / j : v); }
  std::string col(const std::string& name) const { return scaled() ? name + "_over_J" : name; }
};

struct OutputSink {
  std::filesystem::path dir;
  std::string prefix;
  std::vector<std::string> written;

  void write(const std::string& name, const std::string& body) {
    const std::string file = prefix + name;
    const auto path = dir / file;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    out.flush();
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    written.push_back(file);
  }
};

std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

void sort_by_re_im(std::vector<std::complex<double>>& v) {
  std::sort(v.begin(), v.end(), [](const std::complex<double>& a, const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

const char* family_name(const PerturbationSpec& pert) {
  if (std::holds_alternative<TwoSitePlus>(pert)) return "plus";
  if (std::holds_alternative<TwoSiteMinus>(pert)) return "minus";
  if (std::holds_alternative<TwoSiteDoublePlus>(pert)) return "double_plus";
  if (std::holds_alternative<SingleSite>(pert)) return "single_site";
  return "none";
}

PerturbationSpec with_sites(const PerturbationSpec& proto, int p, int q) {
  if (std::holds_alternative<TwoSitePlus>(proto)) return TwoSitePlus{p, q};
  if (std::holds_alternative<TwoSiteMinus>(proto)) return TwoSiteMinus{p, q};
  if (std::holds_alternative<TwoSiteDoublePlus>(proto)) return TwoSiteDoublePlus{p, q};
  const auto s = std::get<SingleSite>(proto);
  return SingleSite{p, s.gamma_plus, s.gamma_minus};
}

struct ThresholdRow {
  int p = 0, q = 0;
  ThresholdResult result;
};

int run_spectrum(const RunConfig& c, OutputSink& sink, json& manifest) {
  const Spectrum s = eigenvalues(build_hamiltonian_at(c.chain, c.perturbation, c.gamma));
  auto eigs = s.eigenvalues;
  sort_by_re_im(eigs);

  const EnergyFmt e{c.chain.coupling_j};
  std::string body = csv_row({"index", e.col("re"), e.col("im")});
  for (std::size_t i = 0; i < eigs.size(); ++i)
    body += csv_row({std::to_string(i), e.cell(eigs[i].real()), e.cell(eigs[i].imag())});
  sink.write("spectrum.csv", body);

  manifest["dim"] = eigs.size();
  manifest["qr_sweeps"] = s.iterations;
  manifest["max_residual"] = s.max_residual;
  std::printf("spectrum: %zu eigenvalues, residual %s\n", eigs.size(), fmt_g(s.max_residual).c_str());
  return 0;
}

int run_threshold(const RunConfig& c, OutputSink& sink, json& manifest) {
  std::vector<std::pair<int, int>> sites;
  if (c.all_pairs) {
    for (int p = 1; p <= c.chain.n_sites; ++p)
      for (int q = 1; q <= c.chain.n_sites; ++q) sites.emplace_back(p, q);
  } else if (c.all_sites) {
    for (int p = 1; p <= c.chain.n_sites; ++p) sites.emplace_back(p, p);
  } else if (const auto* s = std::get_if<SingleSite>(&c.perturbation)) {
    sites.emplace_back(s->p, s->p);
  } else {
    std::visit(
        [&](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (!std::is_same_v<T, NoPerturbation> && !std::is_same_v<T, SingleSite>)
            sites.emplace_back(t.p, t.q);
        },
        c.perturbation);
  }

  std::vector<ThresholdRow> rows;
  long long evaluations = 0, qr_sweeps = 0;
  int reentrant = 0;
  for (const auto& [p, q] : sites) {
    ThresholdRow r;
    r.p = p;
    r.q = q;
    r.result = find_threshold(c.chain, with_sites(c.perturbation, p, q), c.threshold);
    evaluations += r.result.evaluations;
    qr_sweeps += r.result.qr_sweeps;
    reentrant += r.result.reentrant ? 1 : 0;
    rows.push_back(std::move(r));
  }

  const EnergyFmt e{c.chain.coupling_j};
  std::string body = csv_row({"p", "q", "class", e.col("gamma_pt"), e.col("bracket_lo"),
                              e.col("bracket_hi"), "evaluations"});
  int found = 0;
  for (const auto& r : rows) {
    const bool has = r.result.gamma_pt.has_value();
    found += has ? 1 : 0;
    body += csv_row({std::to_string(r.p), std::to_string(r.q), to_string(r.result.classification),
                     has ? e.cell(*r.result.gamma_pt) : "inf", e.cell(r.result.bracket.first),
                     e.cell(r.result.bracket.second), std::to_string(r.result.evaluations)});
  }
  sink.write("threshold.csv", body);

  manifest["rows"] = rows.size();
  manifest["thresholds_found"] = found;
  manifest["reentrant_rows"] = reentrant;
  manifest["evaluations"] = evaluations;
  manifest["qr_sweeps"] = qr_sweeps;
  std::printf("threshold: %zu searches, %d finite, %d reentrant\n", rows.size(), found, reentrant);
  return 0;
}

int run_flow(const RunConfig& c, OutputSink& sink, json& manifest) {
  const auto grid = c.gamma_grid.points();
  FlowTable table = flow_sweep(c.chain, c.perturbation, grid, c.jobs);

  const EnergyFmt e{c.chain.coupling_j};
  const std::size_t dim = table.rows.empty() ? 0 : table.rows.front().size();
  std::vector<std::string> header{e.col("gamma")};
  for (std::size_t k = 0; k < dim; ++k) {
    header.push_back(e.col("re_" + std::to_string(k)));
    header.push_back(e.col("im_" + std::to_string(k)));
  }
  std::string body = csv_row(header);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    sort_by_re_im(table.rows[i]);
    std::vector<std::string> cells{e.cell(table.gamma_grid[i])};
    for (const auto& z : table.rows[i]) {
      cells.push_back(e.cell(z.real()));
      cells.push_back(e.cell(z.imag()));
    }
    body += csv_row(cells);
  }
  sink.write("flow.csv", body);

  manifest["points"] = grid.size();
  manifest["dim"] = dim;
  manifest["qr_sweeps"] = table.qr_sweeps;
  std::printf("flow: %zu gamma points, %zu eigenvalues each\n", grid.size(), dim);
  return 0;
}

int run_phase_grid(const RunConfig& c, OutputSink& sink, json& manifest) {
  PhaseGrid grid;
  const char* x_name = nullptr;
  const char* y_name = nullptr;
  if (c.plane == PhasePlane::GammaPm) {
    const auto& s = std::get<SingleSite>(c.perturbation);
    grid = phase_grid_single_site(c.chain, s.p, c.gp_grid.points(), c.gm_grid.points(),
                                  c.threshold.snap_tol, c.jobs);
    x_name = "gamma_plus";
    y_name = "gamma_minus";
  } else {
    grid = phase_grid_gamma_hz(c.chain, c.perturbation, c.gamma_grid.points(),
                               c.hz_grid.points(), c.threshold.snap_tol, c.jobs);
    x_name = "gamma";
    y_name = "hz";
  }

  const EnergyFmt e{c.chain.coupling_j};
  std::string body = csv_row({e.col(x_name), e.col(y_name), e.col("max_im")});
  for (std::size_t i = 0; i < grid.y_axis.size(); ++i)
    for (std::size_t j = 0; j < grid.x_axis.size(); ++j)
      body += csv_row({e.cell(grid.x_axis[j]), e.cell(grid.y_axis[i]), e.cell(grid.max_im[i][j])});
  sink.write("phase.csv", body);

  manifest["plane"] = to_string(c.plane);
  manifest["x"] = x_name;
  manifest["y"] = y_name;
  manifest["cells"] = grid.x_axis.size() * grid.y_axis.size();
  manifest["qr_sweeps"] = grid.qr_sweeps;
  std::printf("phase-diagram: %zu x %zu cells (%s vs %s)\n", grid.x_axis.size(),
              grid.y_axis.size(), x_name, y_name);
  return 0;
}

int run_field_response(const RunConfig& c, OutputSink& sink, json& manifest) {
  const FieldResponseFit fit =
      fit_field_response(c.chain, c.perturbation, c.hz_samples, c.threshold);

  const EnergyFmt e{c.chain.coupling_j};
  std::string body = csv_row({e.col("hz"), e.col("gamma_pt")});
  for (std::size_t i = 0; i < fit.hz_samples.size(); ++i)
    body += csv_row({e.cell(fit.hz_samples[i]), e.cell(fit.thresholds[i])});
  sink.write("field_response.csv", body);

  manifest["classification"] = to_string(fit.classification);
  manifest["slope"] = fit.slope;
  manifest["intercept"] = fit.intercept;
  manifest["residual"] = fit.residual;
  manifest["qr_sweeps"] = fit.qr_sweeps;
  std::printf("field-response: %s, slope %s, intercept %s\n", to_string(fit.classification),
              fmt_g(fit.slope).c_str(), fmt_g(fit.intercept).c_str());
  return 0;
}

// Analytic-vs-numeric cross-check at hz = 0: every ordered two-site pair for
// the plus and minus families, plus the one-sided single-site cases, for every
// requested size and both boundaries. PASS means both routes agree within
// twice the bisection tolerance (or both report no threshold).
int run_validate(const RunConfig& c, OutputSink& sink, json& manifest) {
  const EnergyFmt e{c.chain.coupling_j};
  std::string body = csv_row({"n", "boundary", "family", "p", "q", "class", e.col("analytic"),
                              e.col("numeric"), "pass"});
  long long rows = 0, failures = 0, qr_sweeps = 0;
  const double allow = 2.0 * c.threshold.tol;

  const auto check = [&](const SpinChainConfig& chain, const PerturbationSpec& pert, int p,
                         int q) {
    const auto analytic = analytic_threshold_h0(chain, pert);
    const auto numeric = find_threshold(chain, pert, c.threshold);
    qr_sweeps += numeric.qr_sweeps;
    std::string fam = family_name(pert);
    if (const auto* s = std::get_if<SingleSite>(&pert)) {
      // the two one-sided variants otherwise print identical rows
      if (s->gamma_minus == 0.0)
        fam = "single_plus";
      else if (s->gamma_plus == 0.0)
        fam = "single_minus";
    }
    bool pass = false;
    if (!analytic && !numeric.gamma_pt)
      pass = true;
    else if (analytic && numeric.gamma_pt)
      pass = std::abs(*analytic - *numeric.gamma_pt) <= allow;
    // analytic says "never breaks" but the ceiling is finite: disagreement
    ++rows;
    failures += pass ? 0 : 1;
    body += csv_row({std::to_string(chain.n_sites), to_string(chain.boundary), fam,
                     std::to_string(p), std::to_string(q), to_string(numeric.classification),
                     analytic ? e.cell(*analytic) : "inf",
                     numeric.gamma_pt ? e.cell(*numeric.gamma_pt) : "inf", pass ? "1" : "0"});
  };

  for (int n : c.validate_sizes) {
    for (const Boundary b : {Boundary::Open, Boundary::Periodic}) {
      SpinChainConfig chain = c.chain;
      chain.n_sites = n;
      chain.field_hz = 0.0;  // the analytic route only exists without a field
      chain.boundary = b;
      for (int p = 1; p <= n; ++p) {
        for (int q = 1; q <= n; ++q) {
          check(chain, TwoSitePlus{p, q}, p, q);
          check(chain, TwoSiteMinus{p, q}, p, q);
        }
        check(chain, SingleSite{p, 1.0, 0.0}, p, p);
        check(chain, SingleSite{p, 0.0, 1.0}, p, p);
      }
    }
  }
  sink.write("validate.csv", body);

  manifest["rows"] = rows;
  manifest["failures"] = failures;
  manifest["tolerance"] = allow;
  manifest["qr_sweeps"] = qr_sweeps;
  std::printf("validate: %lld comparisons, %lld failures (allowance %s)\n", rows, failures,
              fmt_g(allow).c_str());
  return failures == 0 ? 0 : 2;
}

}  // namespace

int run(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    OutputSink sink;
    sink.dir = config.output_dir;
    sink.prefix = config.prefix;
    std::filesystem::create_directories(sink.dir);

    json manifest;
    manifest["analysis"] = to_string(config.analysis);
    manifest["config"] = json::parse(serialize_config(config));

    int status = 0;
    switch (config.analysis) {
      case Analysis::Spectrum: status = run_spectrum(config, sink, manifest); break;
      case Analysis::Threshold: status = run_threshold(config, sink, manifest); break;
      case Analysis::Flow: status = run_flow(config, sink, manifest); break;
      case Analysis::PhaseGrid: status = run_phase_grid(config, sink, manifest); break;
      case Analysis::FieldResponse: status = run_field_response(config, sink, manifest); break;
      case Analysis::Validate: status = run_validate(config, sink, manifest); break;
    }

    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
            .count();
    manifest["wall_ms"] = ms;
    manifest["outputs"] = sink.written;
    sink.write("manifest.json", manifest.dump(2) + "\n");
    std::printf("wrote %s under %s (%lld ms)\n",
                (sink.prefix + "manifest.json").c_str(), sink.dir.string().c_str(),
                static_cast<long long>(ms));
    return status;
  } catch (const std::ios_base::failure& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 2;
  }
}

}  // namespace ptchain
