#pragma once

// Elementary-estimator component updates and the alternating unit-rank fit.
//
// For each mode m the update is
//   w_m <- S_lambda((P'P + eps I)^{-1} P'y),  P = projection(X, w, m),
// applied Gauss-Seidel style in ascending mode order until the relative
// Frobenius change of the unit-rank coefficient falls to `tol`.

#include "fastr/errors.hpp"
#include "fastr/rng.hpp"
#include "fastr/tensor.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace fastr {

struct FitConfig {
  double lambda = 0.0;
  double epsilon = 1.0;
  int max_iter = 1000;
  double tol = 1e-3;
  std::uint64_t seed = 0;
  /// Rescale factors to equal l2 norm (same outer product) after each sweep.
  bool balance = false;
  /// Degree-of-parallelism hint; results do not depend on it.
  int threads = 1;

  void validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw InvalidArgument("lambda must be finite and >= 0");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      throw InvalidArgument("epsilon must be finite and > 0");
    if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
    if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");
    if (threads < 1) throw InvalidArgument("threads must be >= 1");
  }
};

template <typename Scalar>
struct FitReport {
  FactorSet<Scalar> factors;
  int iterations = 0;
  std::vector<double> rel_change_trace;
  bool converged = false;
};

/// Accumulated wall time (seconds) per phase of the fit loop.
struct PhaseTimings {
  double projection = 0.0;
  double solve = 0.0;
  double threshold = 0.0;
  double stopping = 0.0;
};

template <typename Derived>
Vector<typename Derived::Scalar> soft_threshold(const Eigen::MatrixBase<Derived>& u,
                                                typename Derived::Scalar lambda) {
  using Scalar = typename Derived::Scalar;
  if (!(lambda >= Scalar(0))) throw InvalidArgument("soft_threshold: lambda must be >= 0");
  Vector<Scalar> out(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    const Scalar mag = std::abs(u[i]) - lambda;
    out[i] = mag > Scalar(0) ? std::copysign(mag, u[i]) : Scalar(0);
  }
  return out;
}

/// Solves (P'P + eps I) x = P'y by Cholesky factorization.
template <typename DerivedP, typename DerivedY>
Vector<typename DerivedP::Scalar> ridge_solve(const Eigen::MatrixBase<DerivedP>& P,
                                              const Eigen::MatrixBase<DerivedY>& y,
                                              typename DerivedP::Scalar epsilon) {
  using Scalar = typename DerivedP::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (P.rows() != y.size())
    throw ShapeError("ridge_solve: design has " + std::to_string(P.rows()) + " rows but " +
                     std::to_string(y.size()) + " responses");
  if (!(epsilon > Scalar(0))) throw InvalidArgument("ridge_solve: epsilon must be > 0");
  if (!P.allFinite() || !y.allFinite()) throw NumericError("ridge_solve: non-finite input");

  Mat gram = Mat::Identity(P.cols(), P.cols()) * epsilon;
  gram.template selfadjointView<Eigen::Lower>().rankUpdate(P.transpose());
  const Vector<Scalar> rhs = P.transpose() * y;
  Eigen::LLT<Mat> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericError("ridge_solve: factorization failed");
  Vector<Scalar> x = llt.solve(rhs);
  if (!x.allFinite()) throw NumericError("ridge_solve: non-finite solution");
  return x;
}

template <typename Scalar>
Vector<Scalar> update_component(const Dataset<Scalar>& data, const FactorSet<Scalar>& f, Index mode,
                                const FitConfig& cfg, PhaseTimings* timings = nullptr) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  const RowMatrix<Scalar> P = projection(data.samples(), f, mode, cfg.threads);
  auto t1 = clock::now();
  const Vector<Scalar> ridge = ridge_solve(P, data.responses(), Scalar(cfg.epsilon));
  auto t2 = clock::now();
  Vector<Scalar> out = soft_threshold(ridge, Scalar(cfg.lambda));
  if (timings) {
    auto t3 = clock::now();
    timings->projection += std::chrono::duration<double>(t1 - t0).count();
    timings->solve += std::chrono::duration<double>(t2 - t1).count();
    timings->threshold += std::chrono::duration<double>(t3 - t2).count();
  }
  return out;
}

/// Standard-normal starting factors drawn mode by mode from Rng(seed). A
/// factor whose largest entry is below 1e-12 in magnitude is redrawn.
template <typename Scalar>
FactorSet<Scalar> initial_factors(const Shape& dims, std::uint64_t seed) {
  check_shape(dims);
  Rng rng(seed);
  std::vector<Vector<Scalar>> fs;
  for (Index p : dims) {
    Vector<Scalar> w(p);
    do {
      for (Index i = 0; i < p; ++i) w[i] = Scalar(rng.normal());
    } while (w.cwiseAbs().maxCoeff() < Scalar(1e-12));
    fs.push_back(std::move(w));
  }
  return FactorSet<Scalar>(std::move(fs));
}

/// Rescales every factor to the geometric mean of the factor norms. Leaves
/// the set untouched when any factor is zero.
template <typename Scalar>
void balance_factors(FactorSet<Scalar>& f) {
  const Index M = f.order();
  double log_sum = 0.0;
  std::vector<double> norms;
  for (Index m = 0; m < M; ++m) {
    const double n = static_cast<double>(f[m].norm());
    if (n == 0.0) return;
    norms.push_back(n);
    log_sum += std::log(n);
  }
  const double target = std::exp(log_sum / static_cast<double>(M));
  for (Index m = 0; m < M; ++m) {
    Vector<Scalar> w = f[m] * Scalar(target / norms[static_cast<std::size_t>(m)]);
    f.set(m, std::move(w));
  }
}

/// ||next - prev||_F / ||prev||_F with 0/0 := 0 and x/0 := +inf.
template <typename Scalar>
double relative_change(const DenseTensor<Scalar>& prev, const DenseTensor<Scalar>& next) {
  const double denom = static_cast<double>(frobenius_norm(prev));
  const double num = static_cast<double>((next.data() - prev.data()).norm());
  if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / denom;
}

template <typename Scalar>
FitReport<Scalar> fit(const Dataset<Scalar>& data, const FitConfig& cfg,
                      PhaseTimings* timings = nullptr) {
  cfg.validate();
  if (data.count() < 1) throw InvalidArgument("fit: dataset is empty");

  FitReport<Scalar> report;
  report.factors = initial_factors<Scalar>(data.dims(), cfg.seed);
  DenseTensor<Scalar> prev = outer_product(report.factors);

  for (int t = 1; t <= cfg.max_iter; ++t) {
    for (Index m = 0; m < report.factors.order(); ++m)
      report.factors.set(m, update_component(data, report.factors, m, cfg, timings));
    if (cfg.balance) balance_factors(report.factors);

    const auto s0 = std::chrono::steady_clock::now();
    DenseTensor<Scalar> next = outer_product(report.factors);
    const double change = relative_change(prev, next);
    prev = std::move(next);
    if (timings)
      timings->stopping +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();

    report.rel_change_trace.push_back(change);
    report.iterations = t;
    if (change <= cfg.tol) {
      report.converged = true;
      break;
    }
  }
  return report;
}

/// y_hat_i = <w1 o ... o wM, X_i>, contracting each sample mode by mode.
template <typename Scalar>
Vector<Scalar> predict(const FactorSet<Scalar>& f, const Samples<Scalar>& x, int threads = 1) {
  check_factors_match(x.dims(), f.dims());
  Vector<Scalar> out(x.count());
  parallel_for(x.count(), threads, [&](Index begin, Index end) {
    std::vector<Scalar> a, b;
    for (Index i = begin; i < end; ++i)
      detail::contract_all_but(x.rows().row(i).data(), x.dims(), f, Index{-1}, &out[i], a, b);
  });
  return out;
}

}  // namespace fastr
