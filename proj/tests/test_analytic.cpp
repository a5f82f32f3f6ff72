#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "ptchain/analytic.hpp"
#include "ptchain/eig.hpp"
#include "ptchain/model.hpp"
#include "support/oracles.hpp"

using namespace ptchain;
namespace tt = ptchain::testing;
using tt::Complex;

namespace {

double spectral_radius(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& e : v) m = std::max(m, std::abs(e));
  return m;
}

// how many elements of a can be greedily paired with elements of b within tol
int intersection_count(std::vector<Complex> a, std::vector<Complex> b, double tol) {
  int count = 0;
  for (const auto& x : a) {
    double best = tol;
    size_t best_j = b.size();
    for (size_t j = 0; j < b.size(); ++j) {
      const double d = std::abs(x - b[j]);
      if (d <= best) {
        best = d;
        best_j = j;
      }
    }
    if (best_j < b.size()) {
      b.erase(b.begin() + static_cast<long>(best_j));
      ++count;
    }
  }
  return count;
}

std::vector<Complex> to_vector(const std::array<Complex, 4>& a) {
  return {a.begin(), a.end()};
}

}  // namespace

TEST_CASE("make_reduced_problem: effective field from the neighbor pattern") {
  const auto bulk = make_reduced_problem(0.8, 0.3, {+1, +1});
  CHECK(bulk.kind == ReducedProblem::Kind::TwoByTwo);
  CHECK(bulk.gamma == 0.3);
  CHECK(bulk.h_x == doctest::Approx(-0.8 / 4.0 * 2.0 + 0.15).epsilon(1e-15));
  CHECK(bulk.neighbor_pattern == std::vector<int>{+1, +1});

  const auto edge = make_reduced_problem(0.8, 0.3, {-1});
  CHECK(edge.h_x == doctest::Approx(0.2 + 0.15).epsilon(1e-15));

  CHECK_THROWS_AS((void)make_reduced_problem(1.0, 0.1, {}), std::invalid_argument);
  CHECK_THROWS_AS((void)make_reduced_problem(1.0, 0.1, {+1, -1, +1}), std::invalid_argument);
  CHECK_THROWS_AS((void)make_reduced_problem(1.0, 0.1, {+2}), std::invalid_argument);
}

TEST_CASE("reduced_eigenvalues: exceptional point and pure gain") {
  // anti-aligned neighbors: interaction cancels, h_x = gamma/2, pinned at the EP
  for (double g : {0.05, 0.3, 1.0, 7.5}) {
    const auto rp = make_reduced_problem(1.0, g, {+1, -1});
    const auto e = reduced_eigenvalues(rp);
    CHECK(e[0] == Complex{0.0, 0.0});
    CHECK(e[1] == Complex{0.0, 0.0});
  }
  // h_x = 0 (aligned neighbors, gamma = J): eigenvalues +- i gamma/2
  const auto rp0 = make_reduced_problem(1.0, 1.0, {+1, +1});
  CHECK(rp0.h_x == 0.0);
  const auto e0 = reduced_eigenvalues(rp0);
  CHECK(tt::multisets_match({e0[0], e0[1]}, {{0.0, 0.5}, {0.0, -0.5}}, 1e-15));
}

TEST_CASE("reduced_eigenvalues: agrees with the dense solver on the 2x2 matrix") {
  std::mt19937 rng(1212);
  std::uniform_real_distribution<double> uh(-2.0, 2.0), ug(0.0, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    ReducedProblem rp;
    rp.h_x = uh(rng);
    rp.gamma = ug(rng);
    const auto exact = reduced_eigenvalues(rp);
    const auto dense = eigenvalues(reduced_matrix(rp));
    CHECK(tt::multisets_match({exact[0], exact[1]}, dense.eigenvalues, 1e-12));
  }
}

TEST_CASE("reduced_matrix: sigma_z basis form") {
  ReducedProblem rp;
  rp.h_x = 0.7;
  rp.gamma = 0.4;
  const auto m = reduced_matrix(rp);
  CHECK(m(0, 0) == 0.0);
  CHECK(m(1, 1) == 0.0);
  CHECK(m(0, 1) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(m(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("analytic_threshold_h0: pinned closed-form values") {
  const SpinChainConfig open9{9, 1.0, 0.0, Boundary::Open};
  const SpinChainConfig ring9{9, 1.0, 0.0, Boundary::Periodic};

  CHECK(analytic_threshold_h0(open9, SingleSite{1, 1.0, 0.0}).value() ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(analytic_threshold_h0(open9, SingleSite{5, 1.0, 0.0}).value() ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(analytic_threshold_h0(ring9, TwoSitePlus{2, 3}).value() == 0.0);
  CHECK(analytic_threshold_h0(ring9, TwoSitePlus{2, 7}).value() ==
        doctest::Approx(0.5).epsilon(1e-15));

  // open-chain two-site table
  CHECK(analytic_threshold_h0(open9, TwoSitePlus{1, 9}).value() ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(analytic_threshold_h0(open9, TwoSitePlus{1, 5}).value() ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(analytic_threshold_h0(open9, TwoSitePlus{3, 7}).value() ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(analytic_threshold_h0(open9, TwoSitePlus{4, 5}).value() == 0.0);
  CHECK(!analytic_threshold_h0(open9, TwoSitePlus{4, 4}).has_value());  // Hermitian

  // antisymmetric single-site i*sy
  CHECK(analytic_threshold_h0(open9, TwoSiteMinus{1, 1}).value() ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(analytic_threshold_h0(open9, TwoSiteMinus{4, 4}).value() == 0.0);

  // scaling in J
  const SpinChainConfig openj{9, 1.6, 0.0, Boundary::Open};
  CHECK(analytic_threshold_h0(openj, SingleSite{1, 1.0, 0.0}).value() ==
        doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("analytic_threshold_h0: stored one-sided strength rescales the answer") {
  const SpinChainConfig cfg{6, 1.0, 0.0, Boundary::Open};
  CHECK(analytic_threshold_h0(cfg, SingleSite{1, 0.0, 0.5}).value() ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(analytic_threshold_h0(cfg, SingleSite{3, 2.0, 0.0}).value() ==
        doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("analytic_threshold_h0: raising and lowering one-sided cases coincide") {
  const SpinChainConfig cfg{7, 1.0, 0.0, Boundary::Open};
  for (int p = 1; p <= 7; ++p) {
    const auto up = analytic_threshold_h0(cfg, SingleSite{p, 1.0, 0.0});
    const auto dn = analytic_threshold_h0(cfg, SingleSite{p, 0.0, 1.0});
    REQUIRE(up.has_value());
    REQUIRE(dn.has_value());
    CHECK(up.value() == dn.value());
  }
}

TEST_CASE("analytic_threshold_h0: J=0 degeneracies") {
  const SpinChainConfig flat{5, 0.0, 0.0, Boundary::Open};
  // one-sided perturbations of a zero Hamiltonian are nilpotent: never complex
  CHECK(!analytic_threshold_h0(flat, TwoSitePlus{1, 4}).has_value());
  CHECK(!analytic_threshold_h0(flat, SingleSite{3, 1.0, 0.0}).has_value());
  // i*sy breaks immediately (eigenvalues +-i gamma)
  CHECK(analytic_threshold_h0(flat, TwoSiteMinus{3, 3}).value() == 0.0);
}

TEST_CASE("analytic_threshold_h0: the doubled N=2 ring bond acts like a bulk pair") {
  const SpinChainConfig ring2{2, 1.0, 0.0, Boundary::Periodic};
  CHECK(analytic_threshold_h0(ring2, SingleSite{1, 1.0, 0.0}).value() ==
        doctest::Approx(0.5).epsilon(1e-15));
  const SpinChainConfig line2{2, 1.0, 0.0, Boundary::Open};
  CHECK(analytic_threshold_h0(line2, SingleSite{1, 1.0, 0.0}).value() ==
        doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("adjacent_pattern_threshold: pinned block values") {
  // aligned patterns break immediately
  CHECK(adjacent_pattern_threshold(1.0, +1, +1, +1) == 0.0);
  CHECK(adjacent_pattern_threshold(1.0, -1, -1, +1) == 0.0);
  CHECK(adjacent_pattern_threshold(1.0, 0, +1, +1) == 0.0);
  CHECK(adjacent_pattern_threshold(1.0, +1, -1, -1) == 0.0);
  CHECK(adjacent_pattern_threshold(1.0, 0, -1, -1) == 0.0);
  // the isolated block holds out to 1/sqrt(27), any family
  for (int fam : {+1, -1, +2})
    CHECK(adjacent_pattern_threshold(1.0, 0, 0, fam) ==
          doctest::Approx(1.0 / std::sqrt(27.0)).epsilon(1e-9));
  // fully misaligned patterns reach sqrt(8/27)
  CHECK(adjacent_pattern_threshold(1.0, -1, +1, +1) ==
        doctest::Approx(std::sqrt(8.0 / 27.0)).epsilon(1e-9));
  CHECK(adjacent_pattern_threshold(1.0, +1, -1, +1) ==
        doctest::Approx(std::sqrt(8.0 / 27.0)).epsilon(1e-9));
  CHECK(adjacent_pattern_threshold(1.0, +1, +1, -1) ==
        doctest::Approx(std::sqrt(8.0 / 27.0)).epsilon(1e-9));
  CHECK(adjacent_pattern_threshold(1.0, -1, -1, -1) ==
        doctest::Approx(std::sqrt(8.0 / 27.0)).epsilon(1e-9));
  // mixed single-sided patterns share one algebraic root
  const double mixed = adjacent_pattern_threshold(1.0, -1, 0, +1);
  CHECK(mixed == doctest::Approx(0.274153056).epsilon(1e-8));
  CHECK(adjacent_pattern_threshold(1.0, 0, -1, +1) == doctest::Approx(mixed).epsilon(1e-12));
  CHECK(adjacent_pattern_threshold(1.0, 0, +1, -1) == doctest::Approx(mixed).epsilon(1e-12));
  // linear in J
  CHECK(adjacent_pattern_threshold(1.6, 0, 0, +1) ==
        doctest::Approx(1.6 / std::sqrt(27.0)).epsilon(1e-9));
  // each pinned value is a genuine boundary of the block spectrum
  auto block_im = [](double g, int sl, int sr, int fam) {
    double im = 0.0;
    for (const auto& e : adjacent_block_spectrum(1.0, g, sl, sr, fam))
      im = std::max(im, std::abs(e.imag()));
    return im;
  };
  CHECK(block_im(1.0 / std::sqrt(27.0) - 1e-4, 0, 0, +1) == 0.0);
  CHECK(block_im(1.0 / std::sqrt(27.0) + 1e-4, 0, 0, +1) > 1e-4);
  CHECK(block_im(std::sqrt(8.0 / 27.0) - 1e-4, -1, +1, +1) == 0.0);
  CHECK(block_im(std::sqrt(8.0 / 27.0) + 1e-4, -1, +1, +1) > 1e-4);

  CHECK_THROWS_AS((void)adjacent_pattern_threshold(0.0, 0, 0, +1), std::invalid_argument);
  CHECK_THROWS_AS((void)adjacent_pattern_threshold(1.0, 2, 0, +1), std::invalid_argument);
  CHECK_THROWS_AS((void)adjacent_pattern_threshold(1.0, 0, 0, 3), std::invalid_argument);
}

TEST_CASE("analytic_threshold_h0: constrained adjacent geometries") {
  // N = 2: no outer neighbors, so the pair lives in the isolated block
  const SpinChainConfig line2{2, 1.0, 0.0, Boundary::Open};
  const SpinChainConfig ring2{2, 1.0, 0.0, Boundary::Periodic};
  for (const PerturbationSpec pert : {PerturbationSpec{TwoSitePlus{1, 2}},
                                      PerturbationSpec{TwoSiteMinus{1, 2}}}) {
    CHECK(analytic_threshold_h0(line2, pert).value() ==
          doctest::Approx(1.0 / std::sqrt(27.0)).epsilon(1e-9));
    // the doubled ring bond doubles the effective coupling of the block
    CHECK(analytic_threshold_h0(ring2, pert).value() ==
          doctest::Approx(2.0 / std::sqrt(27.0)).epsilon(1e-9));
  }

  // N = 3 ring: both outer neighbors are the same site, so only equal
  // projections are realizable; the minus family cannot align with any
  const SpinChainConfig ring3{3, 1.0, 0.0, Boundary::Periodic};
  for (auto [p, q] : {std::pair{1, 2}, std::pair{2, 1}, std::pair{1, 3}, std::pair{2, 3}})
    CHECK(analytic_threshold_h0(ring3, TwoSiteMinus{p, q}).value() ==
          doctest::Approx(std::sqrt(8.0 / 27.0)).epsilon(1e-9));
  CHECK(analytic_threshold_h0(ring3, TwoSitePlus{1, 2}).value() == 0.0);

  // the open N = 3 chain still aligns through its one free outer neighbor
  const SpinChainConfig line3{3, 1.0, 0.0, Boundary::Open};
  CHECK(analytic_threshold_h0(line3, TwoSiteMinus{1, 2}).value() == 0.0);
  CHECK(analytic_threshold_h0(line3, TwoSiteMinus{2, 3}).value() == 0.0);
  CHECK(analytic_threshold_h0(line3, TwoSitePlus{1, 2}).value() == 0.0);

  // scaling in J
  const SpinChainConfig ring3j{3, 1.6, 0.0, Boundary::Periodic};
  CHECK(analytic_threshold_h0(ring3j, TwoSiteMinus{1, 2}).value() ==
        doctest::Approx(1.6 * std::sqrt(8.0 / 27.0)).epsilon(1e-9));
}

TEST_CASE("analytic_threshold_h0: domain errors") {
  const SpinChainConfig field{5, 1.0, 0.2, Boundary::Open};
  CHECK_THROWS_AS((void)analytic_threshold_h0(field, TwoSitePlus{1, 5}), std::invalid_argument);
  const SpinChainConfig cfg{5, 1.0, 0.0, Boundary::Open};
  CHECK_THROWS_AS((void)analytic_threshold_h0(cfg, NoPerturbation{}), std::invalid_argument);
  CHECK_THROWS_AS((void)analytic_threshold_h0(cfg, TwoSiteDoublePlus{1, 4}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)analytic_threshold_h0(cfg, SingleSite{2, 0.5, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("adjacent_block_spectrum: isolated block at gamma = 0") {
  const auto e = adjacent_block_spectrum(1.0, 0.0, 0, 0, +1);
  CHECK(tt::multisets_match(to_vector(e),
                            {{0.25, 0.0}, {0.25, 0.0}, {-0.25, 0.0}, {-0.25, 0.0}}, 1e-12));
}

TEST_CASE("adjacent_block_spectrum: some pattern is complex at every gamma > 0") {
  for (int family : {+1, -1, +2}) {
    for (double g : {0.01, 0.05, 0.35}) {
      double worst = 0.0;
      for (const auto& ps : adjacent_block_spectra(1.0, g, family))
        for (const auto& e : ps.eigenvalues) worst = std::max(worst, std::abs(e.imag()));
      CHECK_MESSAGE(worst > 1e-3, "family " << family << " gamma " << g);
    }
  }
}

TEST_CASE("adjacent_block_spectrum: J = 0 blocks are nilpotent") {
  for (int family : {+1, -1, +2})
    for (const auto& e : adjacent_block_spectrum(0.0, 0.4, 0, 0, family))
      CHECK(std::abs(e) <= 1e-4);
}

TEST_CASE("adjacent_block_spectrum: matches characteristic-polynomial roots") {
  // independent route: rebuild the block by explicit tensor products, then
  // take the roots of its characteristic polynomial
  auto build_block = [](double j, double g, int sl, int sr, int family) {
    RealMatrix h(4);
    const double bond = -j / 4.0;
    auto sx = [](int bit, int r) { return r ^ (1 << bit); };
    for (int r = 0; r < 4; ++r) {
      h(r, sx(0, sx(1, r))) += bond;       // sx (x) sx
      h(r, sx(1, r)) += bond * sl;         // left frozen field on slot 1
      h(r, sx(0, r)) += bond * sr;         // right frozen field on slot 2
    }
    for (int r = 0; r < 4; ++r) {
      if (r & 2) h(r ^ 2, r) += g;  // s+ slot 1
      if (family == +2) {
        if (r & 1) h(r ^ 1, r) += g;  // s+ slot 2
      } else {
        if (!(r & 1)) h(r ^ 1, r) += (family == +1 ? g : -g);  // +-s- slot 2
      }
    }
    return h;
  };
  for (int family : {+1, -1, +2})
    for (int sl : {-1, 0, 1})
      for (int sr : {-1, 0, 1})
        for (double g : {0.0, 0.15, 0.6}) {
          const auto lib = adjacent_block_spectrum(1.0, g, sl, sr, family);
          const auto roots = tt::poly_roots(tt::char_poly(build_block(1.0, g, sl, sr, family)));
          CHECK_MESSAGE(tt::multisets_match(to_vector(lib), roots, 1e-5),
                        "family " << family << " sl " << sl << " sr " << sr << " gamma "
                                  << g << " dist "
                                  << tt::multiset_distance(to_vector(lib), roots));
        }
}

TEST_CASE("adjacent_block_spectra: enumerates the four interior patterns") {
  const auto all = adjacent_block_spectra(1.0, 0.2, +1);
  REQUIRE(all.size() == 4);
  int seen = 0;
  for (const auto& ps : all) {
    CHECK(std::abs(ps.s_left) == 1);
    CHECK(std::abs(ps.s_right) == 1);
    seen |= (ps.s_left > 0 ? 1 : 0) | (ps.s_right > 0 ? 2 : 0);
  }
  // patterns must be distinct, so the bitmask accumulates all four combinations
  CHECK(seen == 3);
}

TEST_CASE("single_site_exact_spectrum: matches dense diagonalization") {
  const SpinChainConfig cfg{6, 1.0, 0.0, Boundary::Open};
  struct Probe {
    SingleSite pert;
    double tol;
  };
  for (const auto& probe : {Probe{{1, 0.2, 0.0}, 1e-6}, Probe{{1, 0.3, 0.0}, 1e-6},
                            Probe{{3, 0.4, 0.0}, 1e-6}, Probe{{3, 0.6, 0.0}, 1e-6},
                            Probe{{4, 0.3, 0.15}, 1e-6}, Probe{{2, 0.0, 0.45}, 1e-6}}) {
    const auto exact = single_site_exact_spectrum(cfg, probe.pert);
    const auto dense = eigenvalues(build_hamiltonian(cfg, probe.pert, 1.0));
    REQUIRE(exact.size() == 64);
    const double scale = std::max(1.0, spectral_radius(exact));
    CHECK_MESSAGE(
        tt::multisets_match(exact, dense.eigenvalues, probe.tol * scale),
        "site " << probe.pert.p << " dist "
                << tt::multiset_distance(exact, dense.eigenvalues));
  }
}

TEST_CASE("single_site_exact_spectrum: 128-fold degenerate case and periodic wrap") {
  const SpinChainConfig cfg{7, 1.0, 0.0, Boundary::Periodic};
  const SingleSite pert{4, 0.55, 0.0};
  const auto exact = single_site_exact_spectrum(cfg, pert);
  const auto dense = eigenvalues(build_hamiltonian(cfg, pert, 1.0));
  REQUIRE(exact.size() == 128);
  const double scale = std::max(1.0, spectral_radius(exact));
  CHECK(tt::multisets_match(exact, dense.eigenvalues, 1e-6 * scale));
}

TEST_CASE("single_site_exact_spectrum: rejects transverse field") {
  CHECK_THROWS_AS(
      (void)single_site_exact_spectrum({5, 1.0, 0.1, Boundary::Open}, SingleSite{1, 1.0, 0.0}),
      std::invalid_argument);
}

TEST_CASE("nonadjacent_pair_exact_spectrum: matches dense diagonalization") {
  const SpinChainConfig cfg{7, 1.0, 0.0, Boundary::Open};
  struct Probe {
    int p, q, family;
    double gamma;
  };
  for (const auto& pr : {Probe{1, 7, +1, 0.2}, Probe{1, 7, +1, 0.3}, Probe{1, 7, -1, 0.2},
                         Probe{3, 5, +1, 0.3}, Probe{3, 5, +1, 0.6}, Probe{3, 5, +2, 0.4},
                         Probe{1, 4, -1, 0.35}, Probe{2, 7, +2, 0.3}}) {
    const auto exact = nonadjacent_pair_exact_spectrum(cfg, pr.p, pr.q, pr.gamma, pr.family);
    PerturbationSpec spec;
    if (pr.family == +1)
      spec = TwoSitePlus{pr.p, pr.q};
    else if (pr.family == -1)
      spec = TwoSiteMinus{pr.p, pr.q};
    else
      spec = TwoSiteDoublePlus{pr.p, pr.q};
    const auto dense = eigenvalues(build_hamiltonian(cfg, spec, pr.gamma));
    REQUIRE(exact.size() == 128);
    const double scale = std::max(1.0, spectral_radius(exact));
    // dense spectra of stacked exceptional points carry eps^(1/3) cluster noise
    CHECK_MESSAGE(tt::multisets_match(exact, dense.eigenvalues, 5e-5 * scale),
                  "p " << pr.p << " q " << pr.q << " family " << pr.family << " gamma "
                       << pr.gamma << " dist "
                       << tt::multiset_distance(exact, dense.eigenvalues));
  }
}

TEST_CASE("nonadjacent_pair_exact_spectrum: rejects adjacent or equal sites") {
  const SpinChainConfig cfg{6, 1.0, 0.0, Boundary::Open};
  CHECK_THROWS_AS((void)nonadjacent_pair_exact_spectrum(cfg, 3, 4, 0.2, +1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)nonadjacent_pair_exact_spectrum(cfg, 3, 3, 0.2, +1),
                  std::invalid_argument);
  const SpinChainConfig ring{6, 1.0, 0.0, Boundary::Periodic};
  CHECK_THROWS_AS((void)nonadjacent_pair_exact_spectrum(ring, 1, 6, 0.2, +1),
                  std::invalid_argument);
}

TEST_CASE("flat_eigenvalue_count: combinatorial values") {
  CHECK(flat_eigenvalue_count({6, 1.0, 0.0, Boundary::Open}, 3) == 32);
  CHECK(flat_eigenvalue_count({6, 1.0, 0.0, Boundary::Open}, 1) == 0);
  CHECK(flat_eigenvalue_count({6, 1.0, 0.0, Boundary::Open}, 6) == 0);
  CHECK(flat_eigenvalue_count({8, 1.0, 0.0, Boundary::Open}, 3) == 128);
  CHECK(flat_eigenvalue_count({5, 1.0, 0.0, Boundary::Periodic}, 2) == 16);
  CHECK(flat_eigenvalue_count({2, 1.0, 0.0, Boundary::Periodic}, 1) == 0);
}

TEST_CASE("flat_eigenvalue_count: the counted levels really are gamma independent") {
  const SpinChainConfig cfg{5, 1.0, 0.0, Boundary::Open};
  const long flat = flat_eigenvalue_count(cfg, 3);
  CHECK(flat == 16);
  const auto a = single_site_exact_spectrum(cfg, SingleSite{3, 0.2, 0.0});
  const auto b = single_site_exact_spectrum(cfg, SingleSite{3, 0.7, 0.0});
  CHECK(intersection_count(a, b, 1e-12) >= static_cast<int>(flat));
}
