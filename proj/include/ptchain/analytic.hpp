#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "ptchain/model.hpp"

namespace ptchain {

// Effective problem for perturbed sites at h_z = 0. The sigma_x projections of
// every unperturbed site are conserved, so a single perturbed site sees a
// frozen field and reduces (up to a pattern-dependent energy shift) to the
// two-level Hamiltonian h_x * sx + (gamma/2) * (i*sy), with
//   h_x = -(J/4) * sum(neighbor_pattern) + gamma/2.
// An adjacent perturbed pair reduces to a 4x4 block instead (FourByFour).
struct ReducedProblem {
  double h_x = 0.0;
  double gamma = 0.0;
  enum class Kind { TwoByTwo, FourByFour } kind = Kind::TwoByTwo;
  std::vector<int> neighbor_pattern;  // +-1 projections of the adjacent sites
};

// Reduced problem for one perturbed site from its neighbor pattern (1 entry
// for an edge site, 2 for a bulk site; a periodic N = 2 chain doubles its
// single neighbor and the caller passes both entries).
ReducedProblem make_reduced_problem(double coupling_j, double gamma,
                                    std::vector<int> neighbor_pattern);

// +-sqrt(h_x^2 - gamma^2/4); purely real or a conjugate imaginary pair.
// Requires kind == TwoByTwo.
std::array<std::complex<double>, 2> reduced_eigenvalues(const ReducedProblem& rp);

// In the sigma_z basis the reduced two-level Hamiltonian is the real matrix
// [[0, h_x + gamma/2], [h_x - gamma/2, 0]]. Exposed so tests can cross-check
// reduced_eigenvalues against the dense solver.
RealMatrix reduced_matrix(const ReducedProblem& rp);

// 4x4 block for an adjacent perturbed pair: -(J/4) sx(x)sx + gamma*(s+(x)1 + 1(x)s-)
// plus frozen outer-neighbor fields -(J/4)*s_left sx(x)1 - (J/4)*s_right 1(x)sx.
// s_left/s_right in {-1, 0, +1}; 0 means that side has no neighbor (edge pair,
// or the isolated block when both are 0).
// family: +1 for s+_p + s-_q, -1 for s+_p - s-_q, +2 for s+_p + s+_q.
std::array<std::complex<double>, 4> adjacent_block_spectrum(double coupling_j, double gamma,
                                                            int s_left, int s_right,
                                                            int family = +1);

// All four (s_left, s_right) patterns of an interior adjacent pair, with their
// block spectra. Some pattern turns complex at every gamma > 0 (zero threshold).
struct AdjacentPatternSpectrum {
  int s_left = 0, s_right = 0;
  std::array<std::complex<double>, 4> eigenvalues;
};
std::vector<AdjacentPatternSpectrum> adjacent_block_spectra(double coupling_j, double gamma,
                                                            int family = +1);

// Smallest strength at which one (s_left, s_right) block turns complex,
// linear in J. Patterns aligned with the family break at 0 exactly; the
// isolated (0, 0) block holds out to J/sqrt(27) and the fully misaligned ones
// to J*sqrt(8/27); the mixed patterns sit at an algebraic root pinned by
// bisection on the exact block. These minima decide adjacent-pair thresholds
// on geometries too small for a free pattern choice (N = 2, and the N = 3
// ring, where both outer neighbors are the same site). Requires J > 0 (at
// J = 0 the block is nilpotent and never turns complex).
double adjacent_pattern_threshold(double coupling_j, int s_left, int s_right, int family = +1);

// Closed-form h_z = 0 threshold. nullopt means the spectrum never turns
// complex at any strength (Hermitian case, or no positive breaking strength
// exists: J = 0 one-sided perturbations are nilpotent shifts of H0).
// Supported families: TwoSitePlus, TwoSiteMinus (p == q allowed), and
// one-sided SingleSite (exactly one of gamma_plus/gamma_minus nonzero; the
// result is quoted per unit of the stored strength magnitude).
// Adjacent pairs minimize adjacent_pattern_threshold over the patterns the
// geometry can realize: 0 whenever some realizable pattern aligns with the
// family (always true for N >= 4, and for N = 3 except the ring with the
// minus family), the constrained pattern minimum otherwise (N = 2 has only
// the isolated block, the N = 3 ring forces equal outer projections).
// Requires config.field_hz == 0; throws std::invalid_argument otherwise and
// for unsupported families.
std::optional<double> analytic_threshold_h0(const SpinChainConfig& config,
                                            const PerturbationSpec& pert);

// Exact full spectrum at h_z = 0 for a single-site perturbation, assembled
// from the per-pattern 2x2 blocks (2^(N-1) patterns, two levels each).
// Requires field_hz == 0. Doubles as a high-degeneracy oracle for the dense
// solver.
std::vector<std::complex<double>> single_site_exact_spectrum(const SpinChainConfig& config,
                                                             const SingleSite& pert);

// Exact full spectrum at h_z = 0 for a NON-adjacent two-site pair from the two
// independent per-site 2x2 blocks. family as in adjacent_block_spectrum.
// Requires field_hz == 0, p and q distinct and non-adjacent.
std::vector<std::complex<double>> nonadjacent_pair_exact_spectrum(const SpinChainConfig& config,
                                                                  int p, int q, double gamma,
                                                                  int family);

// Number of gamma-independent (permanently coalesced) eigenvalues a one-sided
// single-site perturbation produces: two per neighbor pattern whose
// projections cancel. Bulk site of an open chain: half of all patterns.
long flat_eigenvalue_count(const SpinChainConfig& config, int p);

}  // namespace ptchain
