// Timing and noise scratchpad for the dense solver on chain-sized matrices.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>

#include "ptchain/eig.hpp"
#include "ptchain/model.hpp"
#include "ptchain/pt.hpp"

using namespace ptchain;

// worst raw |Im| relative to spectral radius over a gamma sweep that should be
// entirely real (below threshold)
static void noise_scan(int n, int p, int q, double gmax) {
  SpinChainConfig config{n, 1.0, 0.0, Boundary::Open};
  const PerturbationSpec pert = TwoSitePlus{p, q};
  double worst = 0.0, worst_g = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double g = gmax * k / 20.0;
    Spectrum s = eigenvalues(build_hamiltonian(config, pert, g));
    double scale = 0.0, im = 0.0;
    for (auto& e : s.eigenvalues) {
      scale = std::max(scale, std::abs(e));
      im = std::max(im, std::abs(e.imag()));
    }
    const double rel = im / scale;
    if (rel > worst) {
      worst = rel;
      worst_g = g;
    }
  }
  std::printf("N=%d (%d,%d) gamma<=%.3g: worst relative Im noise %.3e (at gamma=%.3g)\n", n, p,
              q, gmax, worst, worst_g);
}

int main(int argc, char** argv) {
  if (argc > 1 && argv[1][0] == 'n') {
    noise_scan(5, 2, 4, 0.45);   // bulk pair below J/2
    noise_scan(7, 3, 5, 0.45);
    noise_scan(8, 3, 6, 0.45);
    noise_scan(9, 3, 6, 0.45);
    noise_scan(10, 3, 6, 0.45);
    noise_scan(7, 1, 4, 0.20);   // edge pair below J/4
    return 0;
  }

  const int n = argc > 1 ? std::atoi(argv[1]) : 10;
  SpinChainConfig config{n, 1.0, 0.0, Boundary::Open};
  const PerturbationSpec pert = TwoSitePlus{3, 6};

  const double gamma = argc > 2 ? std::atof(argv[2]) : 0.3;
  const auto t0 = std::chrono::steady_clock::now();
  RealMatrix h = build_hamiltonian(config, pert, gamma);
  const auto t1 = std::chrono::steady_clock::now();
  Spectrum s = eigenvalues(h);
  const auto t2 = std::chrono::steady_clock::now();

  const double ms_build = std::chrono::duration<double, std::milli>(t1 - t0).count();
  const double ms_eig = std::chrono::duration<double, std::milli>(t2 - t1).count();
  std::printf("dim %d: build %.1f ms, eig %.1f ms, %d sweeps, residual %.3e, max_im %.3e\n",
              h.dim(), ms_build, ms_eig, s.iterations, s.max_residual, max_imag(s, 1e-7));
  return 0;
}
