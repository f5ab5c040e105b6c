#pragma once

// Phase-level timing of the fit loop over a ladder of shapes.

#include "fastr/estimator.hpp"
#include "fastr/tensor.hpp"

#include <cstdint>
#include <vector>

namespace fastr {

struct BenchOptions {
  Index n_samples = 100;
  int iterations = 10;
  /// Each rung is timed this many times; the minimum per phase is kept.
  int repeats = 3;
  double lambda = 0.0;
  double epsilon = 1.0;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct BenchRow {
  Shape dims;
  Index n_samples = 0;
  int iterations = 0;
  /// sum over modes of prod_{m' != m} p_m', the per-sample projection work.
  Index projection_work = 0;
  PhaseTimings timings;
  double total = 0.0;
};

/// Cubes of the given edge lengths at a fixed order.
std::vector<Shape> cube_ladder(const std::vector<Index>& edges, Index order);

BenchRow bench_rung(const Shape& dims, const BenchOptions& opts);

std::vector<BenchRow> run_bench(const std::vector<Shape>& ladder, const BenchOptions& opts);

}  // namespace fastr
