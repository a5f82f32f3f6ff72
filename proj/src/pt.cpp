#include "ptchain/pt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fmt_util.hpp"

namespace ptchain {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_settings(const ThresholdSettings& s) {
  if (!(s.gamma_max > 0.0)) fail("gamma_max must be > 0");
  if (!(s.tol > 0.0)) fail("tol must be > 0");
  if (!(s.snap_tol >= 0.0)) fail("snap_tol must be >= 0");
  if (s.scan_points < 1) fail("scan_points must be >= 1");
}

void check_grid(const std::vector<double>& g, const char* name) {
  if (g.empty()) fail(std::string(name) + " must be nonempty");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) fail(std::string(name) + " has a non-finite entry");
    if (i > 0 && !(g[i] > g[i - 1])) fail(std::string(name) + " must be strictly ascending");
  }
}

// fn(i) for i in [0, count), spread over up to `jobs` threads. Assembly stays
// deterministic because every cell writes only its own slot; the first
// exception is rethrown after all workers stop.
void parallel_cells(long count, int jobs, const std::function<void(long)>& fn) {
  jobs = static_cast<int>(std::max(1L, std::min<long>(jobs, count)));
  if (jobs <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const long i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        stop.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

ThresholdSettings default_threshold_settings(const SpinChainConfig& config) {
  ThresholdSettings s;
  double scale = config.coupling_j;
  if (scale <= 0.0) scale = std::abs(config.field_hz);
  if (scale <= 0.0) scale = 1.0;
  s.gamma_max = 2.0 * scale;
  s.tol = 1e-3 * scale;
  s.snap_tol = 1e-5;
  s.scan_points = 64;
  return s;
}

double max_imag(const Spectrum& s, double snap_tol) {
  if (!(snap_tol >= 0.0)) fail("snap_tol must be >= 0");
  double scale = 0.0;
  for (const auto& e : s.eigenvalues) scale = std::max(scale, std::abs(e));
  const double cut = snap_tol * scale;
  double best = 0.0;
  for (const auto& e : s.eigenvalues)
    if (std::abs(e.imag()) > cut) best = std::max(best, e.imag());
  return best;
}

bool is_broken(const SpinChainConfig& config, const PerturbationSpec& pert, double gamma,
               double snap_tol) {
  if (!(gamma >= 0.0)) fail("gamma must be >= 0");
  const Spectrum s = eigenvalues(build_hamiltonian_at(config, pert, gamma));
  return max_imag(s, snap_tol) > 0.0;
}

ThresholdResult find_threshold(const SpinChainConfig& config, const PerturbationSpec& pert,
                               const ThresholdSettings& settings) {
  validate(config, pert);
  check_settings(settings);

  ThresholdResult out;
  out.classification = std::holds_alternative<NoPerturbation>(pert)
                           ? SiteClass::Hermitian
                           : classify_sites(config, pert);

  double lo = 0.0, hi = settings.gamma_max;
  std::string phase = "ceiling check";
  auto fires_at = [&](double g) {
    try {
      const Spectrum s = eigenvalues(build_hamiltonian_at(config, pert, g));
      ++out.evaluations;
      out.qr_sweeps += s.iterations;
      return max_imag(s, settings.snap_tol) > 0.0;
    } catch (const SolverError& e) {
      throw SolverError(phase + " failed at gamma = " + fmt_g(g) + " (bracket so far [" +
                            fmt_g(lo) + ", " + fmt_g(hi) + "]): " + e.what(),
                        e.partial(), e.iterations());
    }
  };
  // Defective eigenvalue clusters (stacked exceptional points) give the QR
  // iteration isolated noise spikes at gammas whose matrix entries are exact
  // binary fractions; the spikes vanish under any tiny offset. A detection
  // only counts if it persists at a jittered second point, so those isolated
  // spikes cannot fake a threshold. Genuine breaking is an interval, not a
  // point, so the confirmation costs one extra diagonalization and at most
  // shifts the bracket by less than the bisection tolerance.
  const double jitter = 0.2371 * settings.tol;
  auto broken_at = [&](double g) {
    if (!fires_at(g)) return false;
    const double probe = (g + jitter <= settings.gamma_max) ? g + jitter : g - jitter;
    if (!(probe >= 0.0) || probe == g) return true;
    return fires_at(probe);
  };

  const bool top_broken = broken_at(settings.gamma_max);

  // ascending coarse scan: the FIRST broken point defines the bracket, which
  // keeps re-entrant windows above the threshold from fooling the bisection
  phase = "ascending scan";
  int first = -1;
  for (int k = 1; k < settings.scan_points; ++k) {
    if (broken_at(settings.gamma_max * k / settings.scan_points)) {
      first = k;
      break;
    }
  }

  if (first < 0 && !top_broken) {
    out.bracket = {0.0, settings.gamma_max};
    return out;  // symmetric spectrum everywhere we looked
  }
  if (first >= 0) {
    lo = settings.gamma_max * (first - 1) / settings.scan_points;
    hi = settings.gamma_max * first / settings.scan_points;
    out.reentrant = !top_broken;  // broken inside, recombined at the ceiling
  } else {
    lo = settings.gamma_max * (settings.scan_points - 1) / settings.scan_points;
    hi = settings.gamma_max;
  }

  phase = "bisection";
  while (hi - lo > settings.tol) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;  // bracket already at float resolution
    if (broken_at(mid))
      hi = mid;
    else
      lo = mid;
  }
  out.bracket = {lo, hi};
  out.gamma_pt = 0.5 * (lo + hi);
  return out;
}

FlowTable flow_sweep(const SpinChainConfig& config, const PerturbationSpec& pert,
                     const std::vector<double>& gamma_grid, int jobs) {
  validate(config, pert);
  check_grid(gamma_grid, "gamma_grid");

  FlowTable out;
  out.gamma_grid = gamma_grid;
  out.rows.resize(gamma_grid.size());
  std::vector<long long> sweeps(gamma_grid.size(), 0);

  parallel_cells(static_cast<long>(gamma_grid.size()), jobs, [&](long i) {
    try {
      Spectrum s = eigenvalues(build_hamiltonian_at(config, pert, gamma_grid[i]));
      sweeps[i] = s.iterations;
      out.rows[i] = std::move(s.eigenvalues);
    } catch (const SolverError& e) {
      throw SolverError("flow point gamma = " + fmt_g(gamma_grid[i]) + ": " + e.what(),
                        e.partial(), e.iterations());
    }
  });
  out.qr_sweeps = std::accumulate(sweeps.begin(), sweeps.end(), 0LL);
  return out;
}

PhaseGrid phase_grid_single_site(const SpinChainConfig& config, int p,
                                 const std::vector<double>& gp_grid,
                                 const std::vector<double>& gm_grid, double snap_tol, int jobs) {
  validate(config);
  if (p < 1 || p > config.n_sites) fail("site p outside the chain");
  check_grid(gp_grid, "gp_grid");
  check_grid(gm_grid, "gm_grid");
  if (!(snap_tol >= 0.0)) fail("snap_tol must be >= 0");

  PhaseGrid out;
  out.x_axis = gp_grid;
  out.y_axis = gm_grid;
  out.max_im.assign(gm_grid.size(), std::vector<double>(gp_grid.size(), 0.0));
  const long nx = static_cast<long>(gp_grid.size());
  std::vector<long long> sweeps(gm_grid.size() * gp_grid.size(), 0);

  parallel_cells(static_cast<long>(gm_grid.size()) * nx, jobs, [&](long cell) {
    const long i = cell / nx, j = cell % nx;
    const SingleSite ss{p, gp_grid[j], gm_grid[i]};
    try {
      const Spectrum s = eigenvalues(build_hamiltonian(config, PerturbationSpec{ss}, 1.0));
      sweeps[cell] = s.iterations;
      out.max_im[i][j] = max_imag(s, snap_tol);
    } catch (const SolverError& e) {
      throw SolverError("phase cell (gamma_plus = " + fmt_g(gp_grid[j]) +
                            ", gamma_minus = " + fmt_g(gm_grid[i]) + "): " + e.what(),
                        e.partial(), e.iterations());
    }
  });
  out.qr_sweeps = std::accumulate(sweeps.begin(), sweeps.end(), 0LL);
  return out;
}

PhaseGrid phase_grid_gamma_hz(const SpinChainConfig& config, const PerturbationSpec& pert,
                              const std::vector<double>& gamma_grid,
                              const std::vector<double>& hz_grid, double snap_tol, int jobs) {
  validate(config, pert);
  check_grid(gamma_grid, "gamma_grid");
  check_grid(hz_grid, "hz_grid");
  if (!(snap_tol >= 0.0)) fail("snap_tol must be >= 0");

  PhaseGrid out;
  out.x_axis = gamma_grid;
  out.y_axis = hz_grid;
  out.max_im.assign(hz_grid.size(), std::vector<double>(gamma_grid.size(), 0.0));
  const long nx = static_cast<long>(gamma_grid.size());
  std::vector<long long> sweeps(hz_grid.size() * gamma_grid.size(), 0);

  parallel_cells(static_cast<long>(hz_grid.size()) * nx, jobs, [&](long cell) {
    const long i = cell / nx, j = cell % nx;
    SpinChainConfig c = config;
    c.field_hz = hz_grid[i];
    try {
      const Spectrum s = eigenvalues(build_hamiltonian_at(c, pert, gamma_grid[j]));
      sweeps[cell] = s.iterations;
      out.max_im[i][j] = max_imag(s, snap_tol);
    } catch (const SolverError& e) {
      throw SolverError("phase cell (gamma = " + fmt_g(gamma_grid[j]) +
                            ", hz = " + fmt_g(hz_grid[i]) + "): " + e.what(),
                        e.partial(), e.iterations());
    }
  });
  out.qr_sweeps = std::accumulate(sweeps.begin(), sweeps.end(), 0LL);
  return out;
}

FieldResponseFit fit_field_response(const SpinChainConfig& config, const PerturbationSpec& pert,
                                    const std::vector<double>& hz_samples,
                                    const ThresholdSettings& settings) {
  validate(config, pert);
  check_settings(settings);
  check_grid(hz_samples, "hz_samples");
  if (hz_samples.size() < 2) fail("a line fit needs at least two hz samples");
  if (!(hz_samples.front() > 0.0))
    fail("hz_samples must be positive (categories jump exactly at hz = 0)");

  FieldResponseFit out;
  out.classification = classify_sites(config, pert);
  out.hz_samples = hz_samples;
  out.thresholds.reserve(hz_samples.size());

  for (double hz : hz_samples) {
    SpinChainConfig c = config;
    c.field_hz = hz;
    const ThresholdResult r = find_threshold(c, pert, settings);
    out.qr_sweeps += r.qr_sweeps;
    if (!r.gamma_pt)
      throw std::runtime_error("no threshold below gamma_max = " + fmt_g(settings.gamma_max) +
                               " at hz = " + fmt_g(hz));
    out.thresholds.push_back(*r.gamma_pt);
  }

  const double n = static_cast<double>(hz_samples.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < hz_samples.size(); ++i) {
    sx += hz_samples[i];
    sy += out.thresholds[i];
    sxx += hz_samples[i] * hz_samples[i];
    sxy += hz_samples[i] * out.thresholds[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) fail("degenerate hz samples, cannot fit a slope");
  out.slope = (n * sxy - sx * sy) / denom;
  out.intercept = (sy - out.slope * sx) / n;
  for (std::size_t i = 0; i < hz_samples.size(); ++i)
    out.residual = std::max(out.residual,
                            std::abs(out.thresholds[i] - (out.intercept + out.slope * hz_samples[i])));
  return out;
}

}  // namespace ptchain
