#include "ptchain/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "ptchain/eig.hpp"

namespace ptchain {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void require_zero_field(const SpinChainConfig& config) {
  if (config.field_hz != 0.0)
    fail("the sigma_x pattern reduction holds only at field_hz = 0");
}

// Neighbor sites of s with multiplicity (periodic N = 2 lists its single
// neighbor twice because two bonds join the pair).
std::vector<int> neighbors_of(const SpinChainConfig& config, int s) {
  std::vector<int> nb;
  for (auto [a, b] : bonds(config)) {
    if (a == s) nb.push_back(b);
    if (b == s) nb.push_back(a);
  }
  return nb;
}

// Every value the neighbor-projection sum of site s can take over sigma_x
// product patterns. Multiplicity matters: a doubled neighbor contributes +-2.
std::vector<int> realizable_neighbor_sums(const SpinChainConfig& config, int s) {
  std::map<int, int> mult;
  for (int m : neighbors_of(config, s)) ++mult[m];
  std::vector<int> sums{0};
  for (auto [site, k] : mult) {
    (void)site;
    std::vector<int> next;
    next.reserve(sums.size() * 2);
    for (int base : sums) {
      next.push_back(base + k);
      next.push_back(base - k);
    }
    sums.swap(next);
  }
  std::sort(sums.begin(), sums.end());
  sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
  return sums;
}

// Smallest breaking strength of a one-sided s+/s- perturbation at a site with
// the given realizable neighbor sums: min over {J*S/4 : S > 0}. Empty set
// (J = 0, or no positive sum) means the site never breaks.
std::optional<double> min_positive_strength(double coupling_j, const std::vector<int>& sums) {
  std::optional<double> best;
  if (coupling_j <= 0.0) return best;
  for (int s : sums)
    if (s > 0) {
      const double cand = coupling_j * s / 4.0;
      if (!best || cand < *best) best = cand;
    }
  return best;
}

// i*sigma_y breaks past |J*S/4| for each pattern, so the threshold is the
// minimum magnitude (an S = 0 pattern gives immediate breaking).
double min_abs_strength(double coupling_j, const std::vector<int>& sums) {
  double best = std::numeric_limits<double>::infinity();
  for (int s : sums) best = std::min(best, std::abs(coupling_j * s / 4.0));
  return best;
}

void check_family(int family) {
  if (family != +1 && family != -1 && family != +2)
    fail("family must be +1 (s+/s-), -1 (s+/-s-), or +2 (s+/s+)");
}

// Unit-J breaking strength of one (s_left, s_right) block, scan plus bisection
// on the exact 4x4. All 27 entries are built once; the most stubborn pattern
// breaks at sqrt(8/27) ~ 0.544, so scanning to 1 always brackets. Immediately
// breaking patterns can grow as slowly as gamma^(3/2), crossing the 1e-7
// detection cut only near 3e-5; anything below 1e-3 is such a pattern and
// snaps to an exact 0, the smallest genuine threshold being 1/sqrt(27) ~ 0.19.
double unit_adjacent_threshold(int s_left, int s_right, int family) {
  auto index = [](int sl, int sr, int fam) {
    const int f = (fam == +1) ? 0 : (fam == -1) ? 1 : 2;
    return ((sl + 1) * 3 + (sr + 1)) * 3 + f;
  };
  static const std::array<double, 27> table = [&index] {
    std::array<double, 27> t{};
    for (int sl : {-1, 0, +1})
      for (int sr : {-1, 0, +1})
        for (int fam : {+1, -1, +2}) {
          auto broken = [&](double g) {
            double im = 0.0;
            for (const auto& e : adjacent_block_spectrum(1.0, g, sl, sr, fam))
              im = std::max(im, std::abs(e.imag()));
            return im > 1e-7;
          };
          const int steps = 1024;
          double lo = 0.0, hi = -1.0;
          for (int k = 1; k <= steps; ++k) {
            const double g = double(k) / steps;
            if (broken(g)) {
              hi = g;
              break;
            }
            lo = g;
          }
          if (hi < 0.0) throw std::logic_error("pattern block unbroken below gamma = 1");
          for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            (broken(mid) ? hi : lo) = mid;
          }
          t[index(sl, sr, fam)] = (hi < 1e-3) ? 0.0 : 0.5 * (lo + hi);
        }
    return t;
  }();
  return table[index(s_left, s_right, family)];
}

// (a, b) with the site term written as a*sx + b*(i*sy)
std::pair<double, double> ab_of_plus(double g) { return {g / 2.0, g / 2.0}; }
std::pair<double, double> ab_of_second_site(double g, int family) {
  switch (family) {
    case +1: return {g / 2.0, -g / 2.0};  // +g * s-
    case -1: return {-g / 2.0, g / 2.0};  // -g * s-
    default: return {g / 2.0, g / 2.0};   // +g * s+
  }
}

std::array<std::complex<double>, 2> block_eigenvalues(double a, double b, double coupling_j,
                                                      double neighbor_sum) {
  const double field = a - coupling_j * neighbor_sum / 4.0;
  const double disc = field * field - b * b;
  if (disc >= 0.0) {
    const double rt = std::sqrt(disc);
    return {std::complex<double>(rt, 0.0), std::complex<double>(-rt, 0.0)};
  }
  const double rt = std::sqrt(-disc);
  return {std::complex<double>(0.0, rt), std::complex<double>(0.0, -rt)};
}

}  // namespace

ReducedProblem make_reduced_problem(double coupling_j, double gamma,
                                    std::vector<int> neighbor_pattern) {
  if (neighbor_pattern.empty() || neighbor_pattern.size() > 2)
    fail("neighbor pattern must hold 1 (edge) or 2 (bulk) projections");
  int sum = 0;
  for (int s : neighbor_pattern) {
    if (s != 1 && s != -1) fail("neighbor projections must be +-1");
    sum += s;
  }
  ReducedProblem rp;
  rp.gamma = gamma;
  rp.h_x = -coupling_j * sum / 4.0 + gamma / 2.0;
  rp.kind = ReducedProblem::Kind::TwoByTwo;
  rp.neighbor_pattern = std::move(neighbor_pattern);
  return rp;
}

std::array<std::complex<double>, 2> reduced_eigenvalues(const ReducedProblem& rp) {
  if (rp.kind != ReducedProblem::Kind::TwoByTwo)
    fail("reduced_eigenvalues handles the TwoByTwo kind only");
  const double disc = rp.h_x * rp.h_x - rp.gamma * rp.gamma / 4.0;
  if (disc >= 0.0) {
    const double rt = std::sqrt(disc);
    return {std::complex<double>(rt, 0.0), std::complex<double>(-rt, 0.0)};
  }
  const double rt = std::sqrt(-disc);
  return {std::complex<double>(0.0, rt), std::complex<double>(0.0, -rt)};
}

RealMatrix reduced_matrix(const ReducedProblem& rp) {
  RealMatrix m(2);
  m(0, 1) = rp.h_x + rp.gamma / 2.0;
  m(1, 0) = rp.h_x - rp.gamma / 2.0;
  return m;
}

std::array<std::complex<double>, 4> adjacent_block_spectrum(double coupling_j, double gamma,
                                                            int s_left, int s_right, int family) {
  if (gamma < 0.0) fail("gamma must be >= 0");
  check_family(family);
  for (int s : {s_left, s_right})
    if (s < -1 || s > 1) fail("neighbor projections must be -1, 0, or +1");

  // slot 1 = first perturbed site (high bit), slot 2 = second (low bit);
  // bit 0 is sigma_z = +1, as everywhere
  RealMatrix h(4);
  const double bond = -coupling_j / 4.0;
  for (int r = 0; r < 4; ++r) h(r, r ^ 3) += bond;                    // sx sx
  for (int r = 0; r < 4; ++r) h(r, r ^ 2) += bond * s_left;           // s_left sx (x) 1
  for (int r = 0; r < 4; ++r) h(r, r ^ 1) += bond * s_right;          // s_right 1 (x) sx
  for (int r = 0; r < 4; ++r)
    if (r & 2) h(r ^ 2, r) += gamma;                                  // s+ on slot 1
  if (family == +2) {
    for (int r = 0; r < 4; ++r)
      if (r & 1) h(r ^ 1, r) += gamma;                                // s+ on slot 2
  } else {
    const double c = (family == +1) ? gamma : -gamma;
    for (int r = 0; r < 4; ++r)
      if (!(r & 1)) h(r ^ 1, r) += c;                                 // +-s- on slot 2
  }

  Spectrum s = eigenvalues(h);
  std::array<std::complex<double>, 4> out;
  std::copy_n(s.eigenvalues.begin(), 4, out.begin());
  return out;
}

std::vector<AdjacentPatternSpectrum> adjacent_block_spectra(double coupling_j, double gamma,
                                                            int family) {
  std::vector<AdjacentPatternSpectrum> out;
  for (int sl : {-1, +1})
    for (int sr : {-1, +1})
      out.push_back({sl, sr, adjacent_block_spectrum(coupling_j, gamma, sl, sr, family)});
  return out;
}

double adjacent_pattern_threshold(double coupling_j, int s_left, int s_right, int family) {
  check_family(family);
  for (int s : {s_left, s_right})
    if (s < -1 || s > 1) fail("neighbor projections must be -1, 0, or +1");
  if (!(coupling_j > 0.0)) fail("adjacent pattern thresholds need a positive coupling");
  return coupling_j * unit_adjacent_threshold(s_left, s_right, family);
}

std::optional<double> analytic_threshold_h0(const SpinChainConfig& config,
                                            const PerturbationSpec& pert) {
  validate(config, pert);
  require_zero_field(config);
  if (std::holds_alternative<NoPerturbation>(pert)) fail("a perturbation is required");
  if (std::holds_alternative<TwoSiteDoublePlus>(pert))
    fail("no closed form is provided for the s+/s+ family");

  const SiteClass cls = classify_sites(config, pert);
  if (cls == SiteClass::Hermitian) return std::nullopt;

  if (cls == SiteClass::Adjacent) {
    if (config.coupling_j <= 0.0) return std::nullopt;  // J = 0: nilpotent, never complex
    int p = 0, q = 0, family = +1;
    if (const auto* tp = std::get_if<TwoSitePlus>(&pert)) {
      p = tp->p;
      q = tp->q;
    } else {
      const auto& tm = std::get<TwoSiteMinus>(pert);
      p = tm.p;
      q = tm.q;
      family = -1;
    }
    // On a chain or ring each member has at most one neighbor besides its
    // partner, and the partner can occupy both bonds (N = 2 ring), which
    // doubles the effective coupling of the block.
    int central_mult = 0, outer_p = 0, outer_q = 0;  // 0 = no outer neighbor
    for (int m : neighbors_of(config, p)) {
      if (m == q)
        ++central_mult;
      else
        outer_p = m;
    }
    for (int m : neighbors_of(config, q))
      if (m != p) outer_q = m;
    const double j_eff = config.coupling_j * central_mult;

    // patterns the geometry can realize; slot order matches the s+ carrier p
    std::vector<std::pair<int, int>> patterns;
    if (outer_p != 0 && outer_p == outer_q) {
      // shared outer site (N = 3 ring): both projections read the same spin
      patterns = {{-1, -1}, {+1, +1}};
    } else {
      const std::vector<int> sp = outer_p ? std::vector<int>{-1, +1} : std::vector<int>{0};
      const std::vector<int> sq = outer_q ? std::vector<int>{-1, +1} : std::vector<int>{0};
      for (int a : sp)
        for (int b : sq) patterns.emplace_back(a, b);
    }
    double best = std::numeric_limits<double>::infinity();
    for (auto [sl, sr] : patterns)
      best = std::min(best, adjacent_pattern_threshold(j_eff, sl, sr, family));
    return best;
  }

  if (const auto* t = std::get_if<TwoSiteMinus>(&pert); t && t->p == t->q) {
    // anti-Hermitian i*sigma_y site
    return min_abs_strength(config.coupling_j, realizable_neighbor_sums(config, t->p));
  }

  if (const auto* ss = std::get_if<SingleSite>(&pert)) {
    const bool plus_only = ss->gamma_minus == 0.0;
    const bool minus_only = ss->gamma_plus == 0.0;
    if (!plus_only && !minus_only)
      fail("closed-form single-site thresholds need a one-sided strength");
    const double base = std::abs(ss->gamma_plus) + std::abs(ss->gamma_minus);
    if (base == 0.0) return std::nullopt;  // no perturbation at all
    auto best = min_positive_strength(config.coupling_j, realizable_neighbor_sums(config, ss->p));
    if (!best) return std::nullopt;
    return *best / base;  // per unit of the stored strength
  }

  // two-site s+/s- pair, non-adjacent: the sites decouple, first site to break wins
  int p = 0, q = 0;
  if (const auto* tp = std::get_if<TwoSitePlus>(&pert)) {
    p = tp->p;
    q = tp->q;
  } else {
    const auto& tm = std::get<TwoSiteMinus>(pert);
    p = tm.p;
    q = tm.q;
  }
  auto bp = min_positive_strength(config.coupling_j, realizable_neighbor_sums(config, p));
  auto bq = min_positive_strength(config.coupling_j, realizable_neighbor_sums(config, q));
  if (bp && bq) return std::min(*bp, *bq);
  if (bp) return bp;
  return bq;
}

std::vector<std::complex<double>> single_site_exact_spectrum(const SpinChainConfig& config,
                                                             const SingleSite& pert) {
  validate(config, PerturbationSpec{pert});
  require_zero_field(config);

  const int n = config.n_sites;
  const int p = pert.p;
  const auto bond_list = bonds(config);

  std::vector<int> pos(n + 1, -1);  // site -> bit in the pattern mask
  int n_free = 0;
  for (int s = 1; s <= n; ++s)
    if (s != p) pos[s] = n_free++;

  const double a = (pert.gamma_plus + pert.gamma_minus) / 2.0;
  const double b = (pert.gamma_plus - pert.gamma_minus) / 2.0;

  std::vector<std::complex<double>> out;
  out.reserve(std::size_t{1} << n);
  for (unsigned mask = 0; mask < (1u << n_free); ++mask) {
    auto sgn = [&](int site) { return ((mask >> pos[site]) & 1) ? -1.0 : 1.0; };
    double e_rest = 0.0, neighbor_sum = 0.0;
    for (auto [x, y] : bond_list) {
      if (x == p)
        neighbor_sum += sgn(y);
      else if (y == p)
        neighbor_sum += sgn(x);
      else
        e_rest += sgn(x) * sgn(y);
    }
    e_rest *= -config.coupling_j / 4.0;
    for (const auto& e : block_eigenvalues(a, b, config.coupling_j, neighbor_sum))
      out.push_back(e_rest + e);
  }
  return out;
}

std::vector<std::complex<double>> nonadjacent_pair_exact_spectrum(const SpinChainConfig& config,
                                                                  int p, int q, double gamma,
                                                                  int family) {
  validate(config);
  require_zero_field(config);
  check_family(family);
  if (p < 1 || p > config.n_sites || q < 1 || q > config.n_sites) fail("site outside the chain");
  if (p == q) fail("the pair reduction needs two distinct sites");
  for (int m : neighbors_of(config, p))
    if (m == q) fail("the pair reduction needs non-adjacent sites");

  const int n = config.n_sites;
  const auto bond_list = bonds(config);

  std::vector<int> pos(n + 1, -1);
  int n_free = 0;
  for (int s = 1; s <= n; ++s)
    if (s != p && s != q) pos[s] = n_free++;

  const auto [ap, bp] = ab_of_plus(gamma);
  const auto [aq, bq] = ab_of_second_site(gamma, family);

  std::vector<std::complex<double>> out;
  out.reserve(std::size_t{1} << n);
  for (unsigned mask = 0; mask < (1u << n_free); ++mask) {
    auto sgn = [&](int site) { return ((mask >> pos[site]) & 1) ? -1.0 : 1.0; };
    double e_rest = 0.0, sum_p = 0.0, sum_q = 0.0;
    for (auto [x, y] : bond_list) {
      // every bond touches at most one perturbed site (the pair shares no bond)
      if (x == p)
        sum_p += sgn(y);
      else if (y == p)
        sum_p += sgn(x);
      else if (x == q)
        sum_q += sgn(y);
      else if (y == q)
        sum_q += sgn(x);
      else
        e_rest += sgn(x) * sgn(y);
    }
    e_rest *= -config.coupling_j / 4.0;
    const auto ep = block_eigenvalues(ap, bp, config.coupling_j, sum_p);
    const auto eq = block_eigenvalues(aq, bq, config.coupling_j, sum_q);
    for (const auto& e1 : ep)
      for (const auto& e2 : eq) out.push_back(e_rest + e1 + e2);
  }
  return out;
}

long flat_eigenvalue_count(const SpinChainConfig& config, int p) {
  validate(config);
  if (p < 1 || p > config.n_sites) fail("site outside the chain");

  const int n = config.n_sites;
  const auto bond_list = bonds(config);
  std::vector<int> pos(n + 1, -1);
  int n_free = 0;
  for (int s = 1; s <= n; ++s)
    if (s != p) pos[s] = n_free++;

  long count = 0;
  for (unsigned mask = 0; mask < (1u << n_free); ++mask) {
    auto sgn = [&](int site) { return ((mask >> pos[site]) & 1) ? -1 : 1; };
    int neighbor_sum = 0;
    for (auto [x, y] : bond_list) {
      if (x == p) neighbor_sum += sgn(y);
      else if (y == p) neighbor_sum += sgn(x);
    }
    if (neighbor_sum == 0) ++count;
  }
  return 2 * count;
}

}  // namespace ptchain
