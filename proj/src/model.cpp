#include "ptchain/model.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ptchain {

namespace {

// Site s (1-based) occupies bit (n_sites - s): site 1 is the most significant
// bit. Bit value 0 means sigma_z = +1.
int bit_of(int n_sites, int site) { return n_sites - site; }

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_site(const SpinChainConfig& config, int site, const char* what) {
  if (site < 1 || site > config.n_sites)
    fail(std::string(what) + " = " + std::to_string(site) + " outside 1.." +
         std::to_string(config.n_sites));
}

// dst += coeff * sx_a sx_b: sigma_x on two distinct sites flips both bits.
void add_xx_bond(RealMatrix& dst, int n_sites, int a, int b, double coeff) {
  const int dim = dst.dim();
  const int mask = (1 << bit_of(n_sites, a)) | (1 << bit_of(n_sites, b));
  for (int r = 0; r < dim; ++r) dst(r, r ^ mask) += coeff;
}

// dst += coeff * sz_s
void add_z(RealMatrix& dst, int n_sites, int s, double coeff) {
  const int dim = dst.dim();
  const int bit = bit_of(n_sites, s);
  for (int r = 0; r < dim; ++r) dst(r, r) += ((r >> bit) & 1) ? -coeff : coeff;
}

// dst += coeff * s+_s  (raises sigma_z from -1 to +1: clears the bit).
// <r'| s+ |r> = 1 when r has the bit set and r' = r with it cleared.
void add_plus(RealMatrix& dst, int n_sites, int s, double coeff) {
  const int dim = dst.dim();
  const int bit = bit_of(n_sites, s);
  const int mask = 1 << bit;
  for (int r = 0; r < dim; ++r)
    if (r & mask) dst(r ^ mask, r) += coeff;
}

// dst += coeff * s-_s (lowers: sets the bit).
void add_minus(RealMatrix& dst, int n_sites, int s, double coeff) {
  const int dim = dst.dim();
  const int bit = bit_of(n_sites, s);
  const int mask = 1 << bit;
  for (int r = 0; r < dim; ++r)
    if (!(r & mask)) dst(r ^ mask, r) += coeff;
}

bool adjacent_pair(const SpinChainConfig& config, int p, int q) {
  if (std::abs(p - q) == 1) return true;
  if (config.boundary == Boundary::Periodic && config.n_sites >= 2) {
    int lo = std::min(p, q), hi = std::max(p, q);
    if (lo == 1 && hi == config.n_sites) return true;
  }
  return false;
}

bool edge_site(const SpinChainConfig& config, int s) {
  if (config.boundary == Boundary::Periodic) return false;  // a ring has no ends
  return s == 1 || s == config.n_sites;
}

SiteClass classify_single(const SpinChainConfig& config, int p) {
  return edge_site(config, p) ? SiteClass::SingleEdge : SiteClass::SingleBulk;
}

SiteClass classify_pair(const SpinChainConfig& config, int p, int q) {
  if (adjacent_pair(config, p, q)) return SiteClass::Adjacent;
  if (edge_site(config, p) || edge_site(config, q)) return SiteClass::EdgeInvolved;
  return SiteClass::BulkPair;
}

}  // namespace

void validate(const SpinChainConfig& config) {
  if (config.n_sites < 1) fail("n_sites must be >= 1, got " + std::to_string(config.n_sites));
  if (config.n_sites > 30) fail("n_sites too large for dense storage");
  if (!(config.coupling_j >= 0.0))
    fail("coupling_j must be finite and >= 0, got " + std::to_string(config.coupling_j));
  if (!std::isfinite(config.coupling_j) || !std::isfinite(config.field_hz))
    fail("chain parameters must be finite");
}

void validate(const SpinChainConfig& config, const PerturbationSpec& pert) {
  validate(config);
  if (const auto* t = std::get_if<TwoSitePlus>(&pert)) {
    check_site(config, t->p, "p");
    check_site(config, t->q, "q");
  } else if (const auto* t = std::get_if<TwoSiteMinus>(&pert)) {
    check_site(config, t->p, "p");
    check_site(config, t->q, "q");
  } else if (const auto* t = std::get_if<TwoSiteDoublePlus>(&pert)) {
    check_site(config, t->p, "p");
    check_site(config, t->q, "q");
  } else if (const auto* s = std::get_if<SingleSite>(&pert)) {
    check_site(config, s->p, "p");
    if (!std::isfinite(s->gamma_plus) || !std::isfinite(s->gamma_minus))
      fail("single-site strengths must be finite");
  }
}

const char* to_string(SiteClass c) {
  switch (c) {
    case SiteClass::Hermitian: return "hermitian";
    case SiteClass::Adjacent: return "adjacent";
    case SiteClass::EdgeInvolved: return "edge_involved";
    case SiteClass::BulkPair: return "bulk_pair";
    case SiteClass::SingleEdge: return "single_edge";
    case SiteClass::SingleBulk: return "single_bulk";
  }
  return "?";
}

const char* to_string(Boundary b) {
  return b == Boundary::Open ? "open" : "periodic";
}

bool is_single_site_class(SiteClass c) {
  return c == SiteClass::SingleEdge || c == SiteClass::SingleBulk;
}

RealMatrix pauli_operator(const SpinChainConfig& config, int site, PauliKind kind) {
  validate(config);
  check_site(config, site, "site");
  const int dim = 1 << config.n_sites;
  RealMatrix m(dim);
  switch (kind) {
    case PauliKind::X:
      add_plus(m, config.n_sites, site, 1.0);
      add_minus(m, config.n_sites, site, 1.0);
      break;
    case PauliKind::Z: add_z(m, config.n_sites, site, 1.0); break;
    case PauliKind::Plus: add_plus(m, config.n_sites, site, 1.0); break;
    case PauliKind::Minus: add_minus(m, config.n_sites, site, 1.0); break;
  }
  return m;
}

std::vector<std::pair<int, int>> bonds(const SpinChainConfig& config) {
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i < config.n_sites; ++i) out.emplace_back(i, i + 1);
  if (config.boundary == Boundary::Periodic && config.n_sites >= 2)
    out.emplace_back(config.n_sites, 1);
  return out;
}

RealMatrix build_h0(const SpinChainConfig& config) {
  validate(config);
  const int dim = 1 << config.n_sites;
  RealMatrix h(dim);
  for (auto [a, b] : bonds(config))
    add_xx_bond(h, config.n_sites, a, b, -config.coupling_j / 4.0);
  for (int s = 1; s <= config.n_sites; ++s)
    add_z(h, config.n_sites, s, -config.field_hz / 2.0);
  return h;
}

RealMatrix build_hamiltonian(const SpinChainConfig& config, const PerturbationSpec& pert,
                             double gamma) {
  validate(config, pert);
  if (!std::isfinite(gamma)) fail("gamma must be finite");
  RealMatrix h = build_h0(config);
  const int n = config.n_sites;
  if (std::holds_alternative<NoPerturbation>(pert)) return h;

  if (const auto* s = std::get_if<SingleSite>(&pert)) {
    // strengths live in the struct; a scale here would be ambiguous
    if (gamma != 1.0) fail("SingleSite carries its own strengths; build with gamma = 1");
    add_plus(h, n, s->p, s->gamma_plus);
    add_minus(h, n, s->p, s->gamma_minus);
    return h;
  }

  if (gamma < 0.0) fail("two-site strength gamma must be >= 0, got " + std::to_string(gamma));
  if (const auto* t = std::get_if<TwoSitePlus>(&pert)) {
    add_plus(h, n, t->p, gamma);
    add_minus(h, n, t->q, gamma);
  } else if (const auto* t = std::get_if<TwoSiteMinus>(&pert)) {
    add_plus(h, n, t->p, gamma);
    add_minus(h, n, t->q, -gamma);
  } else if (const auto* t = std::get_if<TwoSiteDoublePlus>(&pert)) {
    add_plus(h, n, t->p, gamma);
    add_plus(h, n, t->q, gamma);
  }
  return h;
}

RealMatrix build_hamiltonian_at(const SpinChainConfig& config, const PerturbationSpec& pert,
                                double gamma) {
  if (const auto* s = std::get_if<SingleSite>(&pert)) {
    SingleSite scaled{s->p, gamma * s->gamma_plus, gamma * s->gamma_minus};
    return build_hamiltonian(config, PerturbationSpec{scaled}, 1.0);
  }
  return build_hamiltonian(config, pert, gamma);
}

SiteClass classify_sites(const SpinChainConfig& config, const PerturbationSpec& pert) {
  validate(config, pert);
  if (std::holds_alternative<NoPerturbation>(pert))
    fail("classify_sites needs a perturbation");

  if (const auto* t = std::get_if<TwoSitePlus>(&pert)) {
    if (t->p == t->q) return SiteClass::Hermitian;  // s+ + s- = sx on one site
    return classify_pair(config, t->p, t->q);
  }
  if (const auto* t = std::get_if<TwoSiteMinus>(&pert)) {
    if (t->p == t->q) return classify_single(config, t->p);  // i*sy, anti-Hermitian
    return classify_pair(config, t->p, t->q);
  }
  if (const auto* t = std::get_if<TwoSiteDoublePlus>(&pert)) {
    if (t->p == t->q) return classify_single(config, t->p);  // 2*gamma*s+
    return classify_pair(config, t->p, t->q);
  }
  return classify_single(config, std::get<SingleSite>(pert).p);
}

}  // namespace ptchain
