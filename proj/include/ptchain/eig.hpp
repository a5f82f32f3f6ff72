#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptchain/real_matrix.hpp"

namespace ptchain {

// Full complex spectrum of a real matrix plus cheap solver diagnostics.
struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  // |sum(eigenvalues) - trace(input)| / max(inf_norm(input), 1); exact under
  // similarity transforms, so it is a genuine consistency check on the QR path.
  double max_residual = 0.0;
  int iterations = 0;  // QR sweeps consumed
};

// Raised when the QR iteration exhausts its sweep budget before full deflation.
// Carries whatever converged so callers can report partial progress.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<std::complex<double>> partial, int iterations)
      : std::runtime_error(what), partial_(std::move(partial)), iterations_(iterations) {}

  const std::vector<std::complex<double>>& partial() const { return partial_; }
  int iterations() const { return iterations_; }

 private:
  std::vector<std::complex<double>> partial_;
  int iterations_;
};

struct BalanceResult {
  RealMatrix matrix;          // D^-1 A D
  std::vector<double> scale;  // diagonal of D
  int sweeps = 0;
};

// Iterative diagonal similarity scaling (radix 2, no permutation phase) that
// drives each row/column pair toward comparable 1-norms. Identity on matrices
// that are already balanced; never changes eigenvalues.
BalanceResult balance(const RealMatrix& m);

// Householder reduction to upper Hessenberg form (eigenvalues-only: the
// orthogonal factor is not accumulated). Entries below the first subdiagonal
// are exactly zero in the result.
RealMatrix hessenberg(const RealMatrix& m);

// Francis implicit double-shift QR on an upper Hessenberg matrix, extracting
// 1x1 and 2x2 Schur blocks from the bottom. Deflation when a subdiagonal entry
// is <= tol * (|d_above| + |d_below|) in magnitude (matrix norm as fallback
// when both vanish). Exceptional ad-hoc shifts every 10 stalled sweeps; throws
// SolverError after max_iter_per_eig * dim total sweeps.
Spectrum real_schur_eigenvalues(RealMatrix hess, int max_iter_per_eig = 30,
                                double tol = std::numeric_limits<double>::epsilon());

// balance -> hessenberg -> real_schur_eigenvalues, with the residual taken
// against the original input.
Spectrum eigenvalues(const RealMatrix& m);

}  // namespace ptchain
