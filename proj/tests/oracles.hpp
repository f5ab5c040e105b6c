#pragma once

// Brute-force reference computations. These walk every multi-index and use
// plain std::vector storage so they share no code path with the library's
// strided contraction kernels or its Cholesky solve.

#include "fastr/rng.hpp"
#include "fastr/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using fastr::Index;
using fastr::Shape;

/// Every multi-index of `dims` in row-major order.
inline std::vector<std::vector<Index>> multi_indices(const Shape& dims) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> idx(dims.size(), 0);
  while (true) {
    out.push_back(idx);
    int m = static_cast<int>(dims.size()) - 1;
    while (m >= 0 && ++idx[static_cast<std::size_t>(m)] == dims[static_cast<std::size_t>(m)]) {
      idx[static_cast<std::size_t>(m)] = 0;
      --m;
    }
    if (m < 0) break;
  }
  return out;
}

inline Index offset(const Shape& dims, const std::vector<Index>& idx) {
  Index off = 0, stride = 1;
  for (int m = static_cast<int>(dims.size()) - 1; m >= 0; --m) {
    off += idx[static_cast<std::size_t>(m)] * stride;
    stride *= dims[static_cast<std::size_t>(m)];
  }
  return off;
}

inline std::vector<double> mode_contract(const std::vector<double>& t, const Shape& dims,
                                         const std::vector<double>& v, Index mode) {
  Shape out_dims = dims;
  out_dims.erase(out_dims.begin() + mode);
  if (out_dims.empty()) out_dims.push_back(1);
  std::vector<double> out(static_cast<std::size_t>(fastr::shape_size(out_dims)), 0.0);
  for (const auto& idx : multi_indices(dims)) {
    std::vector<Index> oi = idx;
    oi.erase(oi.begin() + mode);
    if (oi.empty()) oi.push_back(0);
    out[static_cast<std::size_t>(offset(out_dims, oi))] +=
        t[static_cast<std::size_t>(offset(dims, idx))] * v[static_cast<std::size_t>(idx[static_cast<std::size_t>(mode)])];
  }
  return out;
}

/// Row i: sum over all multi-indices of X_i[idx] * prod_{m != mode} w_m[idx_m].
inline std::vector<std::vector<double>> projection(const std::vector<std::vector<double>>& samples,
                                                   const Shape& dims,
                                                   const std::vector<std::vector<double>>& w,
                                                   Index mode) {
  std::vector<std::vector<double>> out;
  const auto all = multi_indices(dims);
  for (const auto& x : samples) {
    std::vector<double> row(static_cast<std::size_t>(dims[static_cast<std::size_t>(mode)]), 0.0);
    for (const auto& idx : all) {
      double prod = x[static_cast<std::size_t>(offset(dims, idx))];
      for (std::size_t m = 0; m < dims.size(); ++m)
        if (static_cast<Index>(m) != mode) prod *= w[m][static_cast<std::size_t>(idx[m])];
      row[static_cast<std::size_t>(idx[static_cast<std::size_t>(mode)])] += prod;
    }
    out.push_back(std::move(row));
  }
  return out;
}

/// Gaussian elimination with partial pivoting on A x = b.
inline std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// (P'P + eps I)^{-1} P'y via explicit normal equations and elimination.
inline std::vector<double> ridge(const std::vector<std::vector<double>>& p,
                                 const std::vector<double>& y, double eps) {
  const std::size_t n = p.size();
  const std::size_t q = n ? p[0].size() : 0;
  std::vector<std::vector<double>> a(q, std::vector<double>(q, 0.0));
  std::vector<double> b(q, 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t r = 0; r < n; ++r) a[i][j] += p[r][i] * p[r][j];
    a[i][i] += eps;
    for (std::size_t r = 0; r < n; ++r) b[i] += p[r][i] * y[r];
  }
  return solve(a, b);
}

inline std::vector<double> shrink(const std::vector<double>& u, double lambda) {
  std::vector<double> out;
  for (double v : u) {
    const double mag = std::abs(v) - lambda;
    out.push_back(mag <= 0.0 ? 0.0 : (v < 0.0 ? -mag : mag));
  }
  return out;
}

// Small random instances. A separate engine from the library's Rng keeps the
// generated cases independent of the simulation stream.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double normal() { return dist_(engine_); }
  std::mt19937_64& engine() { return engine_; }
  Index between(Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(engine_);
  }
  std::vector<double> vec(Index n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = normal();
    return v;
  }
  Shape shape(Index max_order, Index max_dim) {
    Shape d(static_cast<std::size_t>(between(1, max_order)));
    for (auto& x : d) x = between(1, max_dim);
    return d;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

inline fastr::Vector<double> to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const fastr::Vector<double>>(v.data(), static_cast<Index>(v.size()));
}

inline fastr::Factors to_factors(const std::vector<std::vector<double>>& w) {
  std::vector<fastr::Vector<double>> fs;
  for (const auto& v : w) fs.push_back(to_eigen(v));
  return fastr::Factors(std::move(fs));
}

inline fastr::SampleSet to_samples(const std::vector<std::vector<double>>& xs, const Shape& dims) {
  fastr::RowMatrix<double> rows(static_cast<Index>(xs.size()), fastr::shape_size(dims));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs[i].size(); ++j)
      rows(static_cast<Index>(i), static_cast<Index>(j)) = xs[i][j];
  return fastr::SampleSet(dims, std::move(rows));
}

inline double max_abs_diff(const std::vector<double>& a, const fastr::Vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[static_cast<Index>(i)]));
  return d;
}

}  // namespace oracle
