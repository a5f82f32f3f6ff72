#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "ptchain/eig.hpp"
#include "ptchain/model.hpp"

namespace ptchain {

// Knobs shared by every threshold search.
//
// snap_tol default balances two measured scales. Below: stacked exceptional
// points give the chain Hamiltonians third-order Jordan blocks, so a
// backward-stable solver carries eps^(1/3) (1-3e-6 measured, N independent)
// of relative imaginary noise on mathematically real spectra. Above: the
// slowest genuine breaking signal is the edge-adjacent pair, whose imaginary
// part grows only as gamma^(3/2)/sqrt(2J), so its zero threshold is detected
// at (snap_tol * radius * sqrt(2))^(2/3); that must stay within a few
// bisection tolerances. 1e-5 sits 3-5x above the noise floor and keeps the
// detection boundary near 1e-3 J at the largest size in scope (N = 10).
struct ThresholdSettings {
  double gamma_max = 0.0;  // search ceiling, > 0
  double tol = 0.0;        // final bracket width, > 0
  double snap_tol = 1e-5;  // relative imaginary-part snap, >= 0
  int scan_points = 64;    // coarse ascending scan resolution, >= 1

  bool operator==(const ThresholdSettings&) const = default;
};

// gamma_max = 2J, tol = 1e-3 J (falling back to the field scale, then to 1,
// when J = 0), snap_tol = 1e-5, 64 scan points.
ThresholdSettings default_threshold_settings(const SpinChainConfig& config);

struct ThresholdResult {
  std::optional<double> gamma_pt;            // empty: never breaks up to gamma_max
  std::pair<double, double> bracket{0., 0.};  // final bisection interval
  SiteClass classification = SiteClass::Hermitian;
  int evaluations = 0;      // spectra computed
  bool reentrant = false;   // scan saw a broken point although gamma_max is unbroken
  long long qr_sweeps = 0;  // total QR iterations across evaluations
};

struct FlowTable {
  std::vector<double> gamma_grid;
  std::vector<std::vector<std::complex<double>>> rows;  // rows[i] belongs to gamma_grid[i]
  long long qr_sweeps = 0;
};

struct PhaseGrid {
  std::vector<double> x_axis, y_axis;
  std::vector<std::vector<double>> max_im;  // max_im[i][j] at (x_axis[j], y_axis[i])
  long long qr_sweeps = 0;
};

struct FieldResponseFit {
  double slope = 0.0;      // dimensionless
  double intercept = 0.0;  // energy units
  double residual = 0.0;   // max |threshold - fitted line| over the samples
  SiteClass classification = SiteClass::Hermitian;
  std::vector<double> hz_samples;
  std::vector<double> thresholds;  // gamma_pt per sample
  long long qr_sweeps = 0;
};

// Max over eigenvalues of Im(lambda), with |Im| <= snap_tol * (spectral radius)
// snapped to exactly 0 first. Never negative.
double max_imag(const Spectrum& s, double snap_tol);

// True iff the spectrum at strength gamma has a surviving imaginary part.
// Requires gamma >= 0.
bool is_broken(const SpinChainConfig& config, const PerturbationSpec& pert, double gamma,
               double snap_tol);

// First-breaking threshold search: evaluate gamma_max, then scan ascending
// multiples of gamma_max / scan_points until the first broken point, then
// bisect that bracket to width tol. No evaluated point broken -> NoThreshold.
// An interior broken point with gamma_max unbroken marks the result reentrant
// (the spectrum recombines above the threshold; threshold is still the first
// breaking). Zero-threshold cases come back as gamma_pt <= tol. A detection
// must persist at a second, jittered gamma before it is trusted: stacked
// exceptional points produce isolated solver-noise spikes at gammas with
// exactly representable matrix entries, and the confirmation filters those
// without moving genuine brackets by more than tol.
ThresholdResult find_threshold(const SpinChainConfig& config, const PerturbationSpec& pert,
                               const ThresholdSettings& settings);

// One full spectrum per grid point (grid nonempty, ascending). jobs > 1
// evaluates points concurrently; assembly stays deterministic. Solver errors
// are rethrown annotated with the failing gamma.
FlowTable flow_sweep(const SpinChainConfig& config, const PerturbationSpec& pert,
                     const std::vector<double>& gamma_grid, int jobs = 1);

// max_im[i][j] = max_imag at (gamma_plus = gp_grid[j], gamma_minus = gm_grid[i])
// for a SingleSite perturbation at site p. Grids nonempty. Cell failures abort
// the grid, annotated with the cell.
PhaseGrid phase_grid_single_site(const SpinChainConfig& config, int p,
                                 const std::vector<double>& gp_grid,
                                 const std::vector<double>& gm_grid, double snap_tol,
                                 int jobs = 1);

// max_im[i][j] = max_imag at (gamma = gamma_grid[j], field_hz = hz_grid[i]),
// sweeping the perturbation strength and the transverse field.
PhaseGrid phase_grid_gamma_hz(const SpinChainConfig& config, const PerturbationSpec& pert,
                              const std::vector<double>& gamma_grid,
                              const std::vector<double>& hz_grid, double snap_tol, int jobs = 1);

// Least-squares line through (h_z, gamma_pt(h_z)). Samples must be positive
// (the h_z = 0 point, where some categories jump, never enters a fit) and
// ascending. A sample whose search comes back NoThreshold raises an error
// naming that h_z.
FieldResponseFit fit_field_response(const SpinChainConfig& config, const PerturbationSpec& pert,
                                    const std::vector<double>& hz_samples,
                                    const ThresholdSettings& settings);

}  // namespace ptchain
