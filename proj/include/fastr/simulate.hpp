#pragma once

// Synthetic sparse unit-rank regression data.
//
// Stream order for a given seed (all draws from one Rng):
//   1. for each mode m: p_m normals for w_m, then floor(s% * p_m) zero
//      positions by partial Fisher-Yates;
//   2. N * prod(p) normals for the samples, sample by sample, row-major;
//   3. N normals for the noise.

#include "fastr/rng.hpp"
#include "fastr/tensor.hpp"

#include <cstdint>

namespace fastr {

struct SimSpec {
  Shape dims;
  Index n_samples = 1;
  double sparsity_pct = 20.0;
  double noise_alpha = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimOutput {
  Data dataset;
  Factors true_factors;
  Tensor true_tensor;
};

/// Number of entries zeroed in a factor of length p at sparsity s percent.
Index zeroed_count(Index p, double sparsity_pct);

Factors gen_factors(const Shape& dims, double sparsity_pct, Rng& rng);

SimOutput gen_dataset(const SimSpec& spec);

}  // namespace fastr
