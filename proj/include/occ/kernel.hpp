#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "occ/soft_model.hpp"

namespace occ {

/// Gaussian kernel k(x, z) = exp(-gamma ||x - z||^2); k(x,x) = 1 and
/// 0 < k <= 1 everywhere.
struct RbfKernel {
  double gamma = 1.0;

  double operator()(std::span<const double> x, std::span<const double> z) const {
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - z[i];
      d2 += d * d;
    }
    return std::exp(-gamma * d2);
  }
};

/// Kernel matrix over one point set. Rows up to `cache_row_limit` are held
/// in a triangular in-memory cache; larger problems fall back to computing
/// entries on the fly.
class GramCache {
 public:
  GramCache(const FeatureMatrix& x, RbfKernel kernel, std::size_t cache_row_limit = 16384)
      : x_(&x), kernel_(kernel), n_(x.rows), cached_(x.rows <= cache_row_limit) {
    if (!(kernel.gamma > 0.0)) throw std::invalid_argument("RbfKernel: gamma must be > 0");
    if (cached_) {
      tri_.resize(n_ * (n_ + 1) / 2);
      for (std::size_t i = 0; i < n_; ++i) {
        const auto xi = x_->row(i);
        double* row = tri_.data() + i * (i + 1) / 2;
        for (std::size_t j = 0; j <= i; ++j) row[j] = kernel_(xi, x_->row(j));
      }
    }
  }

  std::size_t size() const { return n_; }

  double at(std::size_t i, std::size_t j) const {
    if (cached_) {
      return i >= j ? tri_[i * (i + 1) / 2 + j] : tri_[j * (j + 1) / 2 + i];
    }
    return kernel_(x_->row(i), x_->row(j));
  }

 private:
  const FeatureMatrix* x_;
  RbfKernel kernel_;
  std::size_t n_;
  bool cached_;
  std::vector<double> tri_;
};

}  // namespace occ
