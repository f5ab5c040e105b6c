#include "fastr/simulate.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace fastr {

void SimSpec::validate() const {
  check_shape(dims);
  if (n_samples < 1) throw InvalidArgument("simulation needs at least one sample");
  if (!(sparsity_pct >= 0.0 && sparsity_pct <= 100.0))
    throw InvalidArgument("sparsity must lie in [0, 100], got " + std::to_string(sparsity_pct));
  if (!(noise_alpha >= 0.0) || !std::isfinite(noise_alpha))
    throw InvalidArgument("noise alpha must be finite and >= 0");
}

Index zeroed_count(Index p, double sparsity_pct) {
  // Exact for integral percentages: s * p is an integer below 2^53.
  return static_cast<Index>(std::floor(sparsity_pct * static_cast<double>(p) / 100.0));
}

Factors gen_factors(const Shape& dims, double sparsity_pct, Rng& rng) {
  check_shape(dims);
  std::vector<Vector<double>> fs;
  fs.reserve(dims.size());
  for (Index p : dims) {
    Vector<double> w(p);
    for (Index i = 0; i < p; ++i) w[i] = rng.normal();

    const Index k = zeroed_count(p, sparsity_pct);
    std::vector<Index> pos(static_cast<std::size_t>(p));
    std::iota(pos.begin(), pos.end(), Index{0});
    for (Index i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>(i) +
                     static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(p - i)));
      std::swap(pos[static_cast<std::size_t>(i)], pos[j]);
      w[pos[static_cast<std::size_t>(i)]] = 0.0;
    }
    fs.push_back(std::move(w));
  }
  return Factors(std::move(fs));
}

SimOutput gen_dataset(const SimSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Factors factors = gen_factors(spec.dims, spec.sparsity_pct, rng);
  Tensor truth = outer_product(factors);

  const Index n = spec.n_samples;
  const Index size = shape_size(spec.dims);
  RowMatrix<double> rows(n, size);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < size; ++j) rows(i, j) = rng.normal();

  SampleSet samples(spec.dims, std::move(rows));
  Vector<double> y(n);
  for (Index i = 0; i < n; ++i) y[i] = inner_product(truth, samples.sample(i));
  for (Index i = 0; i < n; ++i) y[i] += spec.noise_alpha * rng.normal();

  return SimOutput{Data(std::move(samples), std::move(y)), std::move(factors), std::move(truth)};
}

}  // namespace fastr
