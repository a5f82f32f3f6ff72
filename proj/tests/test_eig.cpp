#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ptchain/eig.hpp"
#include "ptchain/model.hpp"
#include "support/oracles.hpp"

using namespace ptchain;
namespace pt = ptchain::testing;
using pt::Complex;

namespace {

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) {
  const int n = a.dim();
  RealMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

// S = I + 0.1 * strictly lower noise; inverse is the (terminating) geometric
// series in the nilpotent part, so S * inverse(S) == I to roundoff.
std::pair<RealMatrix, RealMatrix> random_unit_lower(int dim, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealMatrix l(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < i; ++j) l(i, j) = 0.1 * u(rng);
  RealMatrix s = RealMatrix::identity(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < i; ++j) s(i, j) += l(i, j);
  // series I - L + L^2 - ... (L^dim = 0)
  RealMatrix inv = RealMatrix::identity(dim);
  RealMatrix power = l;
  double sign = -1.0;
  for (int k = 1; k < dim; ++k) {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) inv(i, j) += sign * power(i, j);
    power = matmul(power, l);
    sign = -sign;
  }
  return {s, inv};
}

double max_abs_imag(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& e : v) m = std::max(m, std::abs(e.imag()));
  return m;
}

double max_abs(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& e : v) m = std::max(m, std::abs(e));
  return m;
}

}  // namespace

TEST_CASE("balance: identity and diagonal matrices are fixed points") {
  const auto id = RealMatrix::identity(5);
  const auto rid = balance(id);
  CHECK(max_abs_diff(rid.matrix, id) == 0.0);

  RealMatrix d(2);
  d(0, 0) = 1.0;
  d(1, 1) = 1e6;
  const auto rd = balance(d);
  CHECK(max_abs_diff(rd.matrix, d) == 0.0);
  CHECK(rd.scale == std::vector<double>{1.0, 1.0});
}

TEST_CASE("balance: wildly scaled 2x2 is equilibrated without moving eigenvalues") {
  RealMatrix m(2);
  m(0, 1) = 1e6;
  m(1, 0) = 1e-6;
  const auto r = balance(m);
  // off-diagonals pulled to the same scale (radix-2 scaling: within a factor 2 of 1)
  CHECK(std::abs(r.matrix(0, 1)) >= 0.5);
  CHECK(std::abs(r.matrix(0, 1)) <= 2.0);
  CHECK(std::abs(r.matrix(1, 0)) >= 0.5);
  CHECK(std::abs(r.matrix(1, 0)) <= 2.0);
  // similarity preserves the product of the off-diagonal pair
  CHECK(r.matrix(0, 1) * r.matrix(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  // and the spectrum is still +-1
  const auto s = eigenvalues(m);
  CHECK(pt::multisets_match(s.eigenvalues, {{-1.0, 0.0}, {1.0, 0.0}}, 1e-10));
}

TEST_CASE("hessenberg: 2x2 and tridiagonal inputs pass through unchanged") {
  std::mt19937 rng(101);
  const auto m2 = pt::random_matrix(2, rng);
  CHECK(max_abs_diff(hessenberg(m2), m2) == 0.0);

  RealMatrix tri(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 6; ++i) {
    tri(i, i) = u(rng);
    if (i + 1 < 6) {
      tri(i, i + 1) = u(rng);
      tri(i + 1, i) = u(rng);
    }
  }
  CHECK(max_abs_diff(hessenberg(tri), tri) == 0.0);
}

TEST_CASE("hessenberg: exact zeros below the subdiagonal") {
  std::mt19937 rng(202);
  for (int dim : {3, 5, 8, 13}) {
    const auto h = hessenberg(pt::random_matrix(dim, rng));
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j + 1 < i; ++j) CHECK(h(i, j) == 0.0);
  }
}

TEST_CASE("hessenberg: similarity preserves characteristic polynomial coefficients") {
  std::mt19937 rng(303);
  for (int rep = 0; rep < 10; ++rep) {
    const auto m = pt::random_matrix(5, rng);
    const auto cm = pt::char_poly(m);
    const auto ch = pt::char_poly(hessenberg(m));
    for (size_t k = 0; k < cm.size(); ++k)
      CHECK(std::abs(ch[k] - cm[k]) <= 1e-10 * std::max(1.0, std::abs(cm[k])));
  }
}

TEST_CASE("real_schur_eigenvalues: Jordan block at the exceptional point") {
  RealMatrix m(2);
  m(0, 1) = 0.3;
  const auto s = real_schur_eigenvalues(m);
  REQUIRE(s.eigenvalues.size() == 2);
  CHECK(s.eigenvalues[0] == Complex{0.0, 0.0});
  CHECK(s.eigenvalues[1] == Complex{0.0, 0.0});
}

TEST_CASE("real_schur_eigenvalues: balanced-gain 2x2 crosses from real to conjugate pair") {
  // [[h, g/2], [-g/2, -h]] has eigenvalues +-sqrt(h^2 - g^2/4)
  auto spectrum_at = [](double hx, double g) {
    RealMatrix m(2);
    m(0, 0) = hx;
    m(0, 1) = g / 2.0;
    m(1, 0) = -g / 2.0;
    m(1, 1) = -hx;
    return real_schur_eigenvalues(m).eigenvalues;
  };
  // real side
  {
    const auto e = spectrum_at(0.5, 0.6);
    const double lam = std::sqrt(0.25 - 0.09);
    CHECK(pt::multisets_match(e, {{-lam, 0.0}, {lam, 0.0}}, 1e-12));
  }
  // broken side
  {
    const auto e = spectrum_at(0.2, 0.6);
    const double lam = std::sqrt(0.09 - 0.04);
    CHECK(pt::multisets_match(e, {{0.0, -lam}, {0.0, lam}}, 1e-12));
  }
  // random sweep across both regimes
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double hx = u(rng), g = u(rng);
    const double disc = hx * hx - g * g / 4.0;
    const auto e = spectrum_at(hx, g);
    std::vector<Complex> expect;
    if (disc >= 0.0)
      expect = {{-std::sqrt(disc), 0.0}, {std::sqrt(disc), 0.0}};
    else
      expect = {{0.0, -std::sqrt(-disc)}, {0.0, std::sqrt(-disc)}};
    CHECK(pt::multisets_match(e, expect, 1e-12));
  }
}

TEST_CASE("real_schur_eigenvalues: random 6x6 agrees with characteristic polynomial roots") {
  std::mt19937 rng(505);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = pt::random_matrix(6, rng);
    const auto s = eigenvalues(m);
    const auto roots = pt::poly_roots(pt::char_poly(m));
    const double scale = std::max(1.0, max_abs(roots));
    CHECK_MESSAGE(pt::multisets_match(s.eigenvalues, roots, 1e-8 * scale),
                  "rep " << rep << " distance "
                         << pt::multiset_distance(s.eigenvalues, roots));
  }
}

TEST_CASE("real_schur_eigenvalues: sweep budget exhaustion raises SolverError") {
  // companion matrix of x^4 - 1: genuine iteration required, so a zero budget trips
  RealMatrix m(4);
  m(0, 3) = 1.0;
  m(1, 0) = 1.0;
  m(2, 1) = 1.0;
  m(3, 2) = 1.0;
  CHECK_THROWS_AS((void)real_schur_eigenvalues(m, 0), SolverError);
  try {
    (void)real_schur_eigenvalues(m, 0);
  } catch (const SolverError& e) {
    CHECK(e.partial().size() < 4);
  }
  // with the default budget the same matrix resolves to the 4th roots of unity
  const auto s = real_schur_eigenvalues(m);
  CHECK(s.iterations > 0);
  CHECK(pt::multisets_match(s.eigenvalues,
                            {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}, 1e-10));
}

TEST_CASE("eigenvalues: commuting-limit chains") {
  const auto s3 = eigenvalues(build_h0({3, 1.0, 0.0, Boundary::Open}));
  CHECK(pt::multisets_match(
      s3.eigenvalues,
      {{-0.5, 0.0}, {-0.5, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.5, 0.0}, {0.5, 0.0}},
      1e-12));

  const auto sz = eigenvalues(build_h0({2, 0.0, 1.0, Boundary::Open}));
  CHECK(pt::multisets_match(sz.eigenvalues,
                            {{-1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}}, 1e-12));
}

TEST_CASE("eigenvalues: edge pair below threshold stays real") {
  const SpinChainConfig cfg{7, 1.0, 0.0, Boundary::Open};
  const auto h = build_hamiltonian(cfg, TwoSitePlus{1, 7}, 0.2);
  const auto s = eigenvalues(h);
  REQUIRE(s.eigenvalues.size() == 128);
  const double scale = std::max(1.0, max_abs(s.eigenvalues));
  CHECK(max_abs_imag(s.eigenvalues) <= 1e-7 * scale);
  CHECK(s.max_residual <= 1e-10);
}

TEST_CASE("eigenvalues: conjugate pairing and trace identity on random matrices") {
  std::mt19937 rng(606);
  for (int dim : {2, 3, 5, 8, 12, 16, 24, 32, 48, 64}) {
    for (int rep = 0; rep < 4; ++rep) {
      const auto m = pt::random_matrix(dim, rng);
      const auto s = eigenvalues(m);
      REQUIRE(static_cast<int>(s.eigenvalues.size()) == dim);
      const double norm = m.infinity_norm();
      CHECK_MESSAGE(pt::conjugate_paired(s.eigenvalues, 1e-8 * norm),
                    "pairing failed at dim " << dim << " rep " << rep);
      Complex sum{0.0, 0.0};
      for (const auto& e : s.eigenvalues) sum += e;
      CHECK(std::abs(sum.real() - m.trace()) <= 1e-8 * dim * norm);
      CHECK(std::abs(sum.imag()) <= 1e-8 * dim * norm);
    }
  }
}

TEST_CASE("eigenvalues: oracle equivalence at small dimension") {
  std::mt19937 rng(707);
  for (int dim = 2; dim <= 8; ++dim) {
    for (int rep = 0; rep < 8; ++rep) {
      const auto m = pt::random_matrix(dim, rng);
      const auto s = eigenvalues(m);
      const auto roots = pt::poly_roots(pt::char_poly(m));
      const double scale = std::max(1.0, max_abs(roots));
      CHECK_MESSAGE(pt::multisets_match(s.eigenvalues, roots, 1e-7 * scale),
                    "dim " << dim << " rep " << rep << " distance "
                           << pt::multiset_distance(s.eigenvalues, roots));
    }
  }
}

TEST_CASE("eigenvalues: determinant identity up to dim 64") {
  std::mt19937 rng(808);
  for (int dim : {2, 4, 8, 16, 32, 64}) {
    for (int rep = 0; rep < 2; ++rep) {
      const auto m = pt::random_matrix(dim, rng);
      const auto s = eigenvalues(m);
      Complex prod{1.0, 0.0};
      for (const auto& e : s.eigenvalues) prod *= e;
      const double det = pt::lu_determinant(m);
      CHECK_MESSAGE(std::abs(prod - Complex{det, 0.0}) <= 1e-6 * std::abs(det),
                    "dim " << dim << " rep " << rep << " det " << det << " prod "
                           << prod.real());
    }
  }
}

TEST_CASE("eigenvalues: invariant under well-conditioned similarity") {
  std::mt19937 rng(909);
  for (int dim : {3, 6, 10, 16}) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto m = pt::random_matrix(dim, rng);
      const auto [s, sinv] = random_unit_lower(dim, rng);
      const auto transformed = matmul(s, matmul(m, sinv));
      const auto ea = eigenvalues(m).eigenvalues;
      const auto eb = eigenvalues(transformed).eigenvalues;
      CHECK_MESSAGE(pt::multisets_match(ea, eb, 1e-6),
                    "dim " << dim << " rep " << rep << " distance "
                           << pt::multiset_distance(ea, eb));
    }
  }
}

TEST_CASE("eigenvalues: recovers planted, well-separated spectra") {
  std::mt19937 rng(111);
  for (int dim : {4, 9, 16, 25}) {
    std::vector<double> diag(dim);
    for (int i = 0; i < dim; ++i) diag[i] = i - dim / 2.0;
    const auto m = pt::planted_matrix(diag, rng);
    const auto s = eigenvalues(m);
    std::vector<Complex> expect(diag.begin(), diag.end());
    CHECK_MESSAGE(pt::multisets_match(s.eigenvalues, expect, 1e-8 * dim),
                  "dim " << dim << " distance "
                         << pt::multiset_distance(s.eigenvalues, expect));
  }
}

TEST_CASE("eigenvalues: residual diagnostic is tiny on chain matrices") {
  const SpinChainConfig cfg{6, 1.0, 0.3, Boundary::Periodic};
  const auto s = eigenvalues(build_hamiltonian(cfg, TwoSiteMinus{2, 5}, 0.4));
  CHECK(s.eigenvalues.size() == 64);
  CHECK(s.max_residual <= 1e-12);
  CHECK(s.iterations > 0);
}
