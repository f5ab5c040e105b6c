#include "fastr/bench.hpp"

#include "fastr/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

namespace fastr {

std::vector<Shape> cube_ladder(const std::vector<Index>& edges, Index order) {
  if (order < 1) throw InvalidArgument("cube order must be >= 1");
  std::vector<Shape> out;
  for (Index e : edges) out.emplace_back(static_cast<std::size_t>(order), e);
  return out;
}

BenchRow bench_rung(const Shape& dims, const BenchOptions& opts) {
  if (opts.iterations < 1 || opts.repeats < 1)
    throw InvalidArgument("bench needs iterations >= 1 and repeats >= 1");
  SimSpec spec;
  spec.dims = dims;
  spec.n_samples = opts.n_samples;
  spec.seed = opts.seed;
  const SimOutput sim = gen_dataset(spec);

  FitConfig cfg;
  cfg.lambda = opts.lambda;
  cfg.epsilon = opts.epsilon;
  cfg.max_iter = opts.iterations;
  // Smallest positive tolerance: only an exact fixed point stops early.
  cfg.tol = std::numeric_limits<double>::denorm_min();
  cfg.seed = opts.seed;
  cfg.threads = opts.threads;

  BenchRow row;
  row.dims = dims;
  row.n_samples = opts.n_samples;
  const Index total = shape_size(dims);
  for (Index p : dims) row.projection_work += total / p;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  row.timings = {kInf, kInf, kInf, kInf};
  row.total = kInf;
  for (int r = 0; r < opts.repeats; ++r) {
    PhaseTimings t;
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = fit(sim.dataset, cfg, &t);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.iterations = report.iterations;
    row.timings.projection = std::min(row.timings.projection, t.projection);
    row.timings.solve = std::min(row.timings.solve, t.solve);
    row.timings.threshold = std::min(row.timings.threshold, t.threshold);
    row.timings.stopping = std::min(row.timings.stopping, t.stopping);
    row.total = std::min(row.total, wall);
  }
  return row;
}

std::vector<BenchRow> run_bench(const std::vector<Shape>& ladder, const BenchOptions& opts) {
  std::vector<BenchRow> rows;
  for (const auto& dims : ladder) rows.push_back(bench_rung(dims, opts));
  return rows;
}

}  // namespace fastr
