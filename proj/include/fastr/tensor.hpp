#pragma once

// Dense M-mode tensors, unit-rank factor sets, and the contraction algebra
// used by the estimator. Storage is row-major: the last index varies fastest.

#include "fastr/errors.hpp"
#include "fastr/parallel.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fastr {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Row-major so that projection rows and sample rows are contiguous.
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Index shape_size(const Shape& dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

inline std::string shape_string(const Shape& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(dims[i]);
  }
  return s;
}

inline void check_shape(const Shape& dims) {
  if (dims.empty()) throw ShapeError("tensor shape must have at least one mode");
  for (Index d : dims)
    if (d < 1) throw ShapeError("tensor dims must be >= 1, got " + shape_string(dims));
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  return x.allFinite();
}

template <typename Scalar>
class DenseTensor {
 public:
  using Scalar_t = Scalar;

  /// Zero-filled tensor of the given shape.
  explicit DenseTensor(Shape dims) : dims_(std::move(dims)) {
    check_shape(dims_);
    data_ = Vector<Scalar>::Zero(shape_size(dims_));
  }

  DenseTensor(Shape dims, Vector<Scalar> data) : dims_(std::move(dims)), data_(std::move(data)) {
    check_shape(dims_);
    if (data_.size() != shape_size(dims_))
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape " + shape_string(dims_));
    if (!all_finite(data_)) throw NumericError("tensor data contains non-finite values");
  }

  const Shape& dims() const { return dims_; }
  Index order() const { return static_cast<Index>(dims_.size()); }
  Index size() const { return data_.size(); }
  const Vector<Scalar>& data() const { return data_; }

  Scalar operator()(std::span<const Index> idx) const { return data_[offset(idx)]; }
  Scalar operator()(std::initializer_list<Index> idx) const {
    return (*this)(std::span<const Index>(idx.begin(), idx.size()));
  }

  Index offset(std::span<const Index> idx) const {
    if (static_cast<Index>(idx.size()) != order())
      throw ShapeError("index arity does not match tensor order");
    Index off = 0;
    for (std::size_t m = 0; m < dims_.size(); ++m) {
      if (idx[m] < 0 || idx[m] >= dims_[m]) throw ShapeError("tensor index out of range");
      off = off * dims_[m] + idx[m];
    }
    return off;
  }

  friend bool operator==(const DenseTensor& a, const DenseTensor& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  Shape dims_;
  Vector<Scalar> data_;
};

/// The M component vectors of a unit-rank tensor w1 o w2 o ... o wM.
template <typename Scalar>
class FactorSet {
 public:
  FactorSet() = default;

  explicit FactorSet(std::vector<Vector<Scalar>> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw ShapeError("factor set must contain at least one factor");
    for (const auto& f : factors_) {
      if (f.size() < 1) throw ShapeError("factors must be non-empty");
      if (!all_finite(f)) throw NumericError("factor contains non-finite values");
    }
  }

  static FactorSet zeros(const Shape& dims) {
    check_shape(dims);
    std::vector<Vector<Scalar>> fs;
    for (Index d : dims) fs.push_back(Vector<Scalar>::Zero(d));
    return FactorSet(std::move(fs));
  }

  Index order() const { return static_cast<Index>(factors_.size()); }
  const Vector<Scalar>& operator[](Index m) const { return factors_[static_cast<std::size_t>(m)]; }
  const std::vector<Vector<Scalar>>& factors() const { return factors_; }

  Shape dims() const {
    Shape d;
    for (const auto& f : factors_) d.push_back(f.size());
    return d;
  }

  /// Replaces one factor; the length must be preserved.
  void set(Index m, Vector<Scalar> value) {
    auto& slot = factors_.at(static_cast<std::size_t>(m));
    if (value.size() != slot.size()) throw ShapeError("replacement factor has wrong length");
    if (!all_finite(value)) throw NumericError("factor contains non-finite values");
    slot = std::move(value);
  }

  friend bool operator==(const FactorSet& a, const FactorSet& b) {
    if (a.factors_.size() != b.factors_.size()) return false;
    for (std::size_t m = 0; m < a.factors_.size(); ++m) {
      if (a.factors_[m].size() != b.factors_[m].size() || a.factors_[m] != b.factors_[m])
        return false;
    }
    return true;
  }

 private:
  std::vector<Vector<Scalar>> factors_;
};

/// N sample tensors of one shape, stored one flattened sample per row.
template <typename Scalar>
class Samples {
 public:
  Samples(Shape dims, RowMatrix<Scalar> rows) : dims_(std::move(dims)), rows_(std::move(rows)) {
    check_shape(dims_);
    if (rows_.cols() != shape_size(dims_))
      throw ShapeError("sample rows have " + std::to_string(rows_.cols()) +
                       " entries, shape " + shape_string(dims_) + " needs " +
                       std::to_string(shape_size(dims_)));
    if (!all_finite(rows_)) throw NumericError("samples contain non-finite values");
  }

  const Shape& dims() const { return dims_; }
  Index order() const { return static_cast<Index>(dims_.size()); }
  Index count() const { return rows_.rows(); }
  const RowMatrix<Scalar>& rows() const { return rows_; }

  DenseTensor<Scalar> sample(Index i) const {
    return DenseTensor<Scalar>(dims_, rows_.row(i).transpose());
  }

  Samples subset(std::span<const Index> idx) const {
    RowMatrix<Scalar> out(static_cast<Index>(idx.size()), rows_.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Index>(r)) = rows_.row(idx[r]);
    return Samples(dims_, std::move(out));
  }

  friend bool operator==(const Samples& a, const Samples& b) {
    return a.dims_ == b.dims_ && a.rows_.rows() == b.rows_.rows() && a.rows_ == b.rows_;
  }

 private:
  Shape dims_;
  RowMatrix<Scalar> rows_;
};

/// Samples paired with one response per sample.
template <typename Scalar>
class Dataset {
 public:
  Dataset(Samples<Scalar> x, Vector<Scalar> y) : x_(std::move(x)), y_(std::move(y)) {
    if (y_.size() != x_.count())
      throw ShapeError("dataset has " + std::to_string(x_.count()) + " samples but " +
                       std::to_string(y_.size()) + " responses");
    if (!all_finite(y_)) throw NumericError("responses contain non-finite values");
  }

  const Samples<Scalar>& samples() const { return x_; }
  const Vector<Scalar>& responses() const { return y_; }
  const Shape& dims() const { return x_.dims(); }
  Index count() const { return x_.count(); }

  Dataset subset(std::span<const Index> idx) const {
    Vector<Scalar> y(static_cast<Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) y[static_cast<Index>(r)] = y_[idx[r]];
    return Dataset(x_.subset(idx), std::move(y));
  }

  Dataset with_responses(Vector<Scalar> y) const { return Dataset(x_, std::move(y)); }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.x_ == b.x_ && a.y_ == b.y_;
  }

 private:
  Samples<Scalar> x_;
  Vector<Scalar> y_;
};

using Tensor = DenseTensor<double>;
using Factors = FactorSet<double>;
using SampleSet = Samples<double>;
using Data = Dataset<double>;

namespace detail {

/// Contracts mode `mode` of a row-major block with extents `dims` against v.
/// out must hold size(dims) / dims[mode] entries. Each output entry sums over
/// j in ascending order.
template <typename Scalar>
void contract_block(const Scalar* in, std::span<const Index> dims, Index mode, const Scalar* v,
                    Scalar* out) {
  Index outer = 1;
  for (Index m = 0; m < mode; ++m) outer *= dims[static_cast<std::size_t>(m)];
  Index inner = 1;
  for (std::size_t m = static_cast<std::size_t>(mode) + 1; m < dims.size(); ++m) inner *= dims[m];
  const Index p = dims[static_cast<std::size_t>(mode)];

  for (Index o = 0; o < outer; ++o) {
    Scalar* dst = out + o * inner;
    const Scalar* src = in + o * p * inner;
    for (Index i = 0; i < inner; ++i) dst[i] = Scalar(0);
    for (Index j = 0; j < p; ++j) {
      const Scalar vj = v[j];
      const Scalar* row = src + j * inner;
      for (Index i = 0; i < inner; ++i) dst[i] += row[i] * vj;
    }
  }
}

/// Contracts one sample by every factor except `keep` (keep < 0: all modes),
/// in ascending mode order. Writes dims[keep] values (or one value) to out.
template <typename Scalar>
void contract_all_but(const Scalar* sample, const Shape& dims, const FactorSet<Scalar>& f,
                      Index keep, Scalar* out, std::vector<Scalar>& a, std::vector<Scalar>& b) {
  const Index order = static_cast<Index>(dims.size());
  Shape cur = dims;
  const Scalar* src = sample;
  std::vector<Scalar>* dst = &a;
  Index removed = 0;
  for (Index m = 0; m < order; ++m) {
    if (m == keep) continue;
    const Index pos = m - removed;
    const Index out_size = shape_size(cur) / cur[static_cast<std::size_t>(pos)];
    dst->resize(static_cast<std::size_t>(out_size));
    contract_block(src, std::span<const Index>(cur), pos, f[m].data(), dst->data());
    cur.erase(cur.begin() + pos);
    ++removed;
    src = dst->data();
    dst = (dst == &a) ? &b : &a;
  }
  const Index n = keep >= 0 ? dims[static_cast<std::size_t>(keep)] : 1;
  if (removed == 0) {
    std::copy(sample, sample + n, out);
  } else {
    std::copy(src, src + n, out);
  }
}

}  // namespace detail

template <typename Scalar>
Scalar inner_product(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b) {
  if (a.dims() != b.dims())
    throw ShapeError("inner_product shape mismatch: " + shape_string(a.dims()) + " vs " +
                     shape_string(b.dims()));
  return a.data().dot(b.data());
}

template <typename Scalar>
Scalar frobenius_norm(const DenseTensor<Scalar>& t) {
  return t.data().norm();
}

template <typename Scalar>
DenseTensor<Scalar> outer_product(const FactorSet<Scalar>& f) {
  if (f.order() == 0) throw ShapeError("outer_product of an empty factor set");
  Vector<Scalar> acc = f[0];
  for (Index m = 1; m < f.order(); ++m) {
    const auto& w = f[m];
    Vector<Scalar> next(acc.size() * w.size());
    for (Index i = 0; i < acc.size(); ++i)
      for (Index j = 0; j < w.size(); ++j) next[i * w.size() + j] = acc[i] * w[j];
    acc = std::move(next);
  }
  return DenseTensor<Scalar>(f.dims(), std::move(acc));
}

/// Mode product t x_mode v (0-based mode). A 1-mode tensor contracts to a
/// 1-element tensor.
template <typename Scalar, typename Derived>
DenseTensor<Scalar> mode_contract(const DenseTensor<Scalar>& t, const Eigen::MatrixBase<Derived>& v,
                                  Index mode) {
  if (mode < 0 || mode >= t.order())
    throw ShapeError("mode " + std::to_string(mode) + " out of range for order " +
                     std::to_string(t.order()));
  const Index p = t.dims()[static_cast<std::size_t>(mode)];
  if (v.size() != p)
    throw ShapeError("contraction vector has length " + std::to_string(v.size()) + ", mode " +
                     std::to_string(mode) + " has extent " + std::to_string(p));
  const Vector<Scalar> vv = v;
  Shape out_dims = t.dims();
  out_dims.erase(out_dims.begin() + mode);
  if (out_dims.empty()) out_dims.push_back(1);
  Vector<Scalar> out(shape_size(out_dims));
  detail::contract_block(t.data().data(), std::span<const Index>(t.dims()), mode, vv.data(),
                         out.data());
  return DenseTensor<Scalar>(std::move(out_dims), std::move(out));
}

inline void check_factors_match(const Shape& dims, const Shape& factor_dims) {
  if (dims != factor_dims)
    throw ShapeError("factor lengths " + shape_string(factor_dims) + " do not match sample shape " +
                     shape_string(dims));
}

/// N x p_mode matrix whose row i is sample i contracted by every factor except
/// the one at `mode`, in ascending mode order. Rows are computed independently,
/// so the result does not depend on `threads`.
template <typename Scalar>
RowMatrix<Scalar> projection(const Samples<Scalar>& x, const FactorSet<Scalar>& f, Index mode,
                             int threads = 1) {
  check_factors_match(x.dims(), f.dims());
  if (mode < 0 || mode >= x.order())
    throw ShapeError("mode " + std::to_string(mode) + " out of range for order " +
                     std::to_string(x.order()));
  const Index p = x.dims()[static_cast<std::size_t>(mode)];
  RowMatrix<Scalar> out(x.count(), p);
  if (x.order() == 1) {
    out = x.rows();
    return out;
  }
  parallel_for(x.count(), threads, [&](Index begin, Index end) {
    std::vector<Scalar> a, b;
    for (Index i = begin; i < end; ++i)
      detail::contract_all_but(x.rows().row(i).data(), x.dims(), f, mode, out.row(i).data(), a, b);
  });
  return out;
}

}  // namespace fastr
