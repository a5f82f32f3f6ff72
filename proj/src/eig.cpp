#include "ptchain/eig.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace ptchain {

BalanceResult balance(const RealMatrix& m) {
  const int n = m.dim();
  BalanceResult out{m, std::vector<double>(n, 1.0), 0};
  RealMatrix& a = out.matrix;
  constexpr double radix = 2.0;
  constexpr double radix2 = radix * radix;

  bool converged = false;
  while (!converged && out.sweeps < 100) {
    converged = true;
    ++out.sweeps;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;  // decoupled direction, scaling cannot help
      const double s = c + r;
      double g = r / radix;
      double f = 1.0;
      while (c < g) {
        f *= radix;
        c *= radix2;
      }
      g = r * radix;
      while (c >= g) {
        f /= radix;
        c /= radix2;
      }
      // accept the power of two only if it shrinks the combined 1-norms
      if ((c + r) / f < 0.95 * s) {
        converged = false;
        out.scale[i] *= f;
        const double ginv = 1.0 / f;
        double* ri = a.row(i);
        for (int j = 0; j < n; ++j) ri[j] *= ginv;
        for (int j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
  return out;
}

RealMatrix hessenberg(const RealMatrix& m) {
  RealMatrix a = m;
  const int n = a.dim();
  std::vector<double> v(n, 0.0), w(n, 0.0);

  for (int k = 0; k + 2 < n; ++k) {
    // Householder reflector P = I - beta v v' that zeroes a(k+2.., k)
    double scale = 0.0;
    for (int i = k + 1; i < n; ++i) scale += std::abs(a(i, k));
    if (scale == 0.0) continue;
    // column already in Hessenberg form: skip, so Hessenberg input is a fixed point
    double below = 0.0;
    for (int i = k + 2; i < n; ++i) below += std::abs(a(i, k));
    if (below == 0.0) continue;
    double norm2 = 0.0;
    for (int i = k + 1; i < n; ++i) {
      v[i] = a(i, k) / scale;
      norm2 += v[i] * v[i];
    }
    const double sigma = std::copysign(std::sqrt(norm2), v[k + 1]);
    v[k + 1] += sigma;                             // no cancellation: same sign
    const double beta = 1.0 / (sigma * v[k + 1]);  // = 2 / v'v

    // column k maps to (-sigma * scale, 0, ...) exactly
    a(k + 1, k) = -sigma * scale;
    for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;

    // left multiply: rows k+1.., cols k+1..  (cols <= k of those rows are 0)
    for (int j = k + 1; j < n; ++j) w[j] = 0.0;
    for (int i = k + 1; i < n; ++i) {
      const double vi = v[i];
      const double* ri = a.row(i);
      for (int j = k + 1; j < n; ++j) w[j] += vi * ri[j];
    }
    for (int i = k + 1; i < n; ++i) {
      const double bvi = beta * v[i];
      double* ri = a.row(i);
      for (int j = k + 1; j < n; ++j) ri[j] -= bvi * w[j];
    }

    // right multiply: all rows, cols k+1..
    for (int i = 0; i < n; ++i) {
      double* ri = a.row(i);
      double u = 0.0;
      for (int j = k + 1; j < n; ++j) u += ri[j] * v[j];
      u *= beta;
      for (int j = k + 1; j < n; ++j) ri[j] -= u * v[j];
    }
  }
  return a;
}

Spectrum real_schur_eigenvalues(RealMatrix h, int max_iter_per_eig, double tol) {
  const int n = h.dim();
  Spectrum out;
  out.eigenvalues.reserve(n);
  if (n == 0) return out;

  const double trace_in = h.trace();
  const double norm_in = h.infinity_norm();

  // 1-norm of the Hessenberg part; deflation fallback when a diagonal pair vanishes
  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* ri = h.row(i);
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(ri[j]);
  }
  if (anorm == 0.0) anorm = 1.0;

  long long budget = static_cast<long long>(max_iter_per_eig) * n;
  int en = n - 1;
  double t = 0.0;  // accumulated exceptional-shift offset
  double p = 0, q = 0, r = 0, x = 0, y = 0, w = 0, zz = 0, s = 0;

  while (en >= 0) {
    int its = 0;
    const int na = en - 1;
    const int enm2 = en - 2;
    for (;;) {
      // smallest l with negligible h(l, l-1); the active block is l..en
      int l = en;
      for (; l > 0; --l) {
        s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(h(l, l - 1)) <= tol * s) break;
      }

      x = h(en, en);
      if (l == en) {  // 1x1 block converged
        out.eigenvalues.emplace_back(x + t, 0.0);
        en -= 1;
        break;
      }
      y = h(na, na);
      w = h(en, na) * h(na, en);
      if (l == na) {  // 2x2 block converged
        p = (y - x) / 2.0;
        q = p * p + w;
        zz = std::sqrt(std::abs(q));
        x += t;
        if (q >= 0.0) {
          zz = p + std::copysign(zz, p);
          const double e1 = x + zz;
          const double e2 = (zz != 0.0) ? x - w / zz : e1;
          out.eigenvalues.emplace_back(e1, 0.0);
          out.eigenvalues.emplace_back(e2, 0.0);
        } else {
          out.eigenvalues.emplace_back(x + p, zz);
          out.eigenvalues.emplace_back(x + p, -zz);
        }
        en -= 2;
        break;
      }

      if (budget == 0)
        throw SolverError("QR sweep budget exhausted with " + std::to_string(en + 1) +
                              " eigenvalues unresolved",
                          out.eigenvalues, out.iterations);

      if (its != 0 && its % 10 == 0) {  // ad-hoc shift to break a stall
        t += x;
        for (int i = 0; i <= en; ++i) h(i, i) -= x;
        s = std::abs(h(en, na)) + std::abs(h(na, enm2));
        x = y = 0.75 * s;
        w = -0.4375 * s * s;
      }
      ++its;
      --budget;
      ++out.iterations;

      // start the bulge at m: two consecutive small subdiagonals, or l
      int m = enm2;
      for (; m >= l; --m) {
        zz = h(m, m);
        r = x - zz;
        s = y - zz;
        p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
        q = h(m + 1, m + 1) - zz - r - s;
        r = h(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        const double tst1 =
            std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(zz) + std::abs(h(m + 1, m + 1)));
        const double tst2 = std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r));
        if (tst2 <= tol * tst1) break;
      }
      for (int i = m + 2; i <= en; ++i) {
        h(i, i - 2) = 0.0;
        if (i > m + 2) h(i, i - 3) = 0.0;
      }

      // Francis double-shift sweep, chasing the 3x3 bulge from m to en
      for (int k = m; k <= na; ++k) {
        const bool notlast = (k != na);
        if (k != m) {
          p = h(k, k - 1);
          q = h(k + 1, k - 1);
          r = notlast ? h(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x == 0.0) continue;
          p /= x;
          q /= x;
          r /= x;
        }
        s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
        if (k == m) {
          if (l != m) h(k, k - 1) = -h(k, k - 1);
        } else {
          h(k, k - 1) = -s * x;
        }
        p += s;
        x = p / s;
        y = q / s;
        zz = r / s;
        q /= p;
        r /= p;

        if (notlast) {
          double* rk = h.row(k);
          double* rk1 = h.row(k + 1);
          double* rk2 = h.row(k + 2);
          for (int j = k; j <= en; ++j) {  // row modification
            const double pp = rk[j] + q * rk1[j] + r * rk2[j];
            rk[j] -= pp * x;
            rk1[j] -= pp * y;
            rk2[j] -= pp * zz;
          }
          const int imax = std::min(en, k + 3);
          for (int i = l; i <= imax; ++i) {  // column modification
            const double pp = x * h(i, k) + y * h(i, k + 1) + zz * h(i, k + 2);
            h(i, k) -= pp;
            h(i, k + 1) -= pp * q;
            h(i, k + 2) -= pp * r;
          }
        } else {
          double* rk = h.row(k);
          double* rk1 = h.row(k + 1);
          for (int j = k; j <= en; ++j) {
            const double pp = rk[j] + q * rk1[j];
            rk[j] -= pp * x;
            rk1[j] -= pp * y;
          }
          const int imax = std::min(en, k + 3);
          for (int i = l; i <= imax; ++i) {
            const double pp = x * h(i, k) + y * h(i, k + 1);
            h(i, k) -= pp;
            h(i, k + 1) -= pp * q;
          }
        }
      }
    }
  }

  double sum_re = 0.0;
  for (const auto& e : out.eigenvalues) sum_re += e.real();
  out.max_residual = std::abs(sum_re - trace_in) / std::max(norm_in, 1.0);
  return out;
}

Spectrum eigenvalues(const RealMatrix& m) {
  if (!m.all_finite()) throw std::invalid_argument("eigenvalues: non-finite entries in input");
  const double tr = m.trace();
  const double nrm = m.infinity_norm();

  BalanceResult bal = balance(m);
  RealMatrix hess = hessenberg(bal.matrix);
  Spectrum out = real_schur_eigenvalues(std::move(hess));

  double sum_re = 0.0;
  for (const auto& e : out.eigenvalues) sum_re += e.real();
  out.max_residual = std::abs(sum_re - tr) / std::max(nrm, 1.0);
  return out;
}

}  // namespace ptchain
