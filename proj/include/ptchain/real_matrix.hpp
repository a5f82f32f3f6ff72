#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace ptchain {

// Dense real square matrix, row-major contiguous storage.
// All chain Hamiltonians in this code are purely real in the sigma_z product
// basis (i*sigma_y is the real matrix [[0,1],[-1,0]]), so double is enough.
class RealMatrix {
 public:
  RealMatrix() = default;
  explicit RealMatrix(int dim)
      : dim_(dim), a_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0) {
    assert(dim >= 0);
  }

  int dim() const { return dim_; }

  double& operator()(int i, int j) { return a_[idx(i, j)]; }
  double operator()(int i, int j) const { return a_[idx(i, j)]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * dim_; }
  const double* row(int i) const { return a_.data() + static_cast<std::size_t>(i) * dim_; }

  static RealMatrix identity(int dim) {
    RealMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  // max row sum of absolute values
  double infinity_norm() const {
    double best = 0.0;
    for (int i = 0; i < dim_; ++i) {
      double s = 0.0;
      const double* r = row(i);
      for (int j = 0; j < dim_; ++j) s += std::abs(r[j]);
      if (s > best) best = s;
    }
    return best;
  }

  bool all_finite() const {
    for (double v : a_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool operator==(const RealMatrix&) const = default;

 private:
  std::size_t idx(int i, int j) const {
    assert(i >= 0 && i < dim_ && j >= 0 && j < dim_);
    return static_cast<std::size_t>(i) * dim_ + j;
  }

  int dim_ = 0;
  std::vector<double> a_;
};

inline double max_abs_diff(const RealMatrix& a, const RealMatrix& b) {
  assert(a.dim() == b.dim());
  double best = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) best = std::max(best, std::abs(a(i, j) - b(i, j)));
  return best;
}

}  // namespace ptchain
