#pragma once

#include <string>
#include <variant>
#include <vector>

#include "ptchain/real_matrix.hpp"

namespace ptchain {

enum class Boundary { Open, Periodic };

// Chain geometry and the Hermitian couplings. Sites are 1-indexed.
//
// H0 = -(J/4) sum_i sx_i sx_{i+1} - (hz/2) sum_i sz_i,
// with the (N,1) bond present only for Periodic boundary.
struct SpinChainConfig {
  int n_sites = 0;
  double coupling_j = 0.0;  // ferromagnetic sx-sx coupling, >= 0
  double field_hz = 0.0;    // transverse field along z
  Boundary boundary = Boundary::Open;

  bool operator==(const SpinChainConfig&) const = default;
};

// throws std::invalid_argument when n_sites < 1, coupling_j < 0, or a value is non-finite
void validate(const SpinChainConfig& config);

// Non-Hermitian perturbation families. Site indices are 1-based.
// Each two-site family carries its overall strength gamma at matrix-build time;
// SingleSite owns its two (possibly signed) strengths directly.
struct TwoSitePlus {  // gamma * (s+_p + s-_q)
  int p = 0, q = 0;
  bool operator==(const TwoSitePlus&) const = default;
};
struct TwoSiteMinus {  // gamma * (s+_p - s-_q); p == q gives the antisymmetric i*sy
  int p = 0, q = 0;
  bool operator==(const TwoSiteMinus&) const = default;
};
struct TwoSiteDoublePlus {  // gamma * (s+_p + s+_q)
  int p = 0, q = 0;
  bool operator==(const TwoSiteDoublePlus&) const = default;
};
struct SingleSite {  // gamma_plus * s+_p + gamma_minus * s-_p
  int p = 0;
  double gamma_plus = 0.0, gamma_minus = 0.0;
  bool operator==(const SingleSite&) const = default;
};
struct NoPerturbation {
  bool operator==(const NoPerturbation&) const = default;
};

using PerturbationSpec =
    std::variant<NoPerturbation, TwoSitePlus, TwoSiteMinus, TwoSiteDoublePlus, SingleSite>;

// throws std::invalid_argument when a site index falls outside 1..n_sites
void validate(const SpinChainConfig& config, const PerturbationSpec& pert);

// Geometric category that fixes the h_z = 0 breaking threshold.
enum class SiteClass { Hermitian, Adjacent, EdgeInvolved, BulkPair, SingleEdge, SingleBulk };

const char* to_string(SiteClass c);
const char* to_string(Boundary b);

enum class PauliKind { X, Z, Plus, Minus };

// Single-site operator embedded in the full 2^N space.
// Basis convention (frozen everywhere): site 1 is the most significant bit of
// the basis index, and bit value 0 means sigma_z eigenvalue +1.
RealMatrix pauli_operator(const SpinChainConfig& config, int site, PauliKind kind);

// Nearest-neighbor bonds as 1-based site pairs, in build order: (1,2)..(N-1,N),
// plus (N,1) for Periodic. N = 2 Periodic deliberately carries the (1,2) bond
// twice (chain bond and wrap bond); N = 1 has no bonds.
std::vector<std::pair<int, int>> bonds(const SpinChainConfig& config);

// Hermitian part: -(J/4) sum sx sx - (hz/2) sum sz.
RealMatrix build_h0(const SpinChainConfig& config);

// H0 plus the perturbation at overall strength gamma.
// Two-site families: matrix elements are +-gamma at the s+/s- slots; requires
// gamma >= 0. SingleSite: strengths already live in the struct, so gamma must be
// exactly 1.0 (use build_hamiltonian_at for sweeps). NoPerturbation returns H0.
RealMatrix build_hamiltonian(const SpinChainConfig& config, const PerturbationSpec& pert,
                             double gamma);

// Sweep convention: two-site families build at strength gamma, SingleSite
// builds with both stored strengths multiplied by gamma.
RealMatrix build_hamiltonian_at(const SpinChainConfig& config, const PerturbationSpec& pert,
                                double gamma);

// Category of the perturbed sites. Requires pert != NoPerturbation.
//   TwoSitePlus p == q          -> Hermitian (s+ + s- = sx)
//   adjacent pair               -> Adjacent (|p-q| = 1, or {1,N} under Periodic)
//   non-adjacent pair w/ edge   -> EdgeInvolved (Open only)
//   non-adjacent interior pair  -> BulkPair
//   single site (incl. p == q of TwoSiteMinus / TwoSiteDoublePlus)
//                               -> SingleEdge at an open end, else SingleBulk
// Under Periodic boundary no site is an edge.
SiteClass classify_sites(const SpinChainConfig& config, const PerturbationSpec& pert);

bool is_single_site_class(SiteClass c);

}  // namespace ptchain
