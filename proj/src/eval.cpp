#include "fastr/eval.hpp"

#include "fastr/parallel.hpp"
#include "fastr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace fastr {

double mse(const Vector<double>& y_hat, const Vector<double>& y) {
  if (y_hat.size() != y.size())
    throw ShapeError("mse: length mismatch " + std::to_string(y_hat.size()) + " vs " +
                     std::to_string(y.size()));
  if (y.size() < 1) throw InvalidArgument("mse: empty input");
  return (y_hat - y).squaredNorm() / static_cast<double>(y.size());
}

double coefficient_error(const Tensor& w_hat, const Tensor& w_star) {
  if (w_hat.dims() != w_star.dims())
    throw ShapeError("coefficient_error: shape mismatch " + shape_string(w_hat.dims()) + " vs " +
                     shape_string(w_star.dims()));
  const double denom = frobenius_norm(w_star);
  if (denom == 0.0) throw ZeroNormError("coefficient_error: ground truth has zero norm");
  return (w_hat.data() - w_star.data()).norm() / denom;
}

double auc(const Vector<double>& scores, const std::vector<bool>& positive) {
  if (static_cast<std::size_t>(scores.size()) != positive.size())
    throw ShapeError("auc: scores and labels differ in length");
  std::vector<double> pos, neg;
  for (Index i = 0; i < scores.size(); ++i)
    (positive[static_cast<std::size_t>(i)] ? pos : neg).push_back(scores[i]);
  if (pos.empty() || neg.empty()) throw InvalidArgument("auc: both classes must be present");

  // Count, for each positive, negatives strictly below and tied, via sorting.
  std::sort(neg.begin(), neg.end());
  double wins = 0.0;
  for (double s : pos) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), s);
    const auto hi = std::upper_bound(neg.begin(), neg.end(), s);
    wins += static_cast<double>(lo - neg.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

bool is_binary(const Vector<double>& labels) {
  if (labels.size() == 0) return false;
  const bool zero_one = (labels.array() == 0.0 || labels.array() == 1.0).all();
  const bool signed_one = (labels.array() == -1.0 || labels.array() == 1.0).all();
  return zero_one || signed_one;
}

std::vector<bool> positive_flags(const Vector<double>& labels) {
  if (!is_binary(labels)) throw InvalidArgument("labels are not binary");
  std::vector<bool> out(static_cast<std::size_t>(labels.size()));
  for (Index i = 0; i < labels.size(); ++i) out[static_cast<std::size_t>(i)] = labels[i] == 1.0;
  return out;
}

Vector<double> signed_coding(const Vector<double>& labels) {
  const auto pos = positive_flags(labels);
  Vector<double> out(labels.size());
  for (Index i = 0; i < labels.size(); ++i) out[i] = pos[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
  return out;
}

void CVGrid::validate(Index n_samples) const {
  if (lambdas.empty() || epsilons.empty()) throw InvalidArgument("CV grid must be non-empty");
  for (double l : lambdas)
    if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidArgument("CV lambdas must be >= 0");
  for (double e : epsilons)
    if (!(e > 0.0) || !std::isfinite(e)) throw InvalidArgument("CV epsilons must be > 0");
  if (k < 2) throw InvalidArgument("CV needs k >= 2");
  if (k > n_samples)
    throw InvalidArgument("CV needs k <= N (k = " + std::to_string(k) +
                          ", N = " + std::to_string(n_samples) + ")");
}

CVGrid CVGrid::defaults() {
  CVGrid g;
  for (int i = 0; i < 7; ++i) g.lambdas.push_back(std::pow(10.0, -4.0 + 5.0 * i / 6.0));
  for (int i = 0; i < 6; ++i) g.epsilons.push_back(std::pow(10.0, -3.0 + i));
  g.k = 5;
  return g;
}

std::vector<int> assign_folds(Index n, int k, std::uint64_t seed) {
  if (k < 2 || k > n) throw InvalidArgument("fold count must satisfy 2 <= k <= N");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<int> fold(static_cast<std::size_t>(n));
  const Index base = n / k;
  const Index extra = n % k;
  Index pos = 0;
  for (int f = 0; f < k; ++f) {
    const Index len = base + (f < extra ? 1 : 0);
    for (Index j = 0; j < len; ++j) fold[static_cast<std::size_t>(order[static_cast<std::size_t>(pos++)])] = f;
  }
  return fold;
}

CVResult kfold_cv(const Data& data, const CVGrid& grid, const FitConfig& base) {
  grid.validate(data.count());
  base.validate();

  CVResult result;
  result.fold_assignment = assign_folds(data.count(), grid.k, base.seed);

  std::vector<Data> train, valid;
  for (int f = 0; f < grid.k; ++f) {
    std::vector<Index> tr, va;
    for (Index i = 0; i < data.count(); ++i)
      (result.fold_assignment[static_cast<std::size_t>(i)] == f ? va : tr).push_back(i);
    train.push_back(data.subset(tr));
    valid.push_back(data.subset(va));
  }

  const Index n_lam = static_cast<Index>(grid.lambdas.size());
  const Index n_eps = static_cast<Index>(grid.epsilons.size());
  const Index n_cells = n_lam * n_eps;
  const Index n_jobs = n_cells * grid.k;
  std::vector<double> job_scores(static_cast<std::size_t>(n_jobs));

  parallel_for(n_jobs, base.threads, [&](Index begin, Index end) {
    for (Index job = begin; job < end; ++job) {
      const Index cell = job / grid.k;
      const auto f = static_cast<std::size_t>(job % grid.k);
      FitConfig cfg = base;
      cfg.threads = 1;
      cfg.lambda = grid.lambdas[static_cast<std::size_t>(cell / n_eps)];
      cfg.epsilon = grid.epsilons[static_cast<std::size_t>(cell % n_eps)];
      double score = std::numeric_limits<double>::quiet_NaN();
      try {
        const auto report = fit(train[f], cfg);
        score = mse(predict(report.factors, valid[f].samples()), valid[f].responses());
      } catch (const Error&) {
      }
      job_scores[static_cast<std::size_t>(job)] = score;
    }
  });

  result.cell_scores.resize(n_lam, n_eps);
  result.fold_scores.assign(static_cast<std::size_t>(n_cells), {});
  for (Index cell = 0; cell < n_cells; ++cell) {
    double sum = 0.0;
    int ok = 0;
    auto& folds = result.fold_scores[static_cast<std::size_t>(cell)];
    for (int f = 0; f < grid.k; ++f) {
      const double s = job_scores[static_cast<std::size_t>(cell * grid.k + f)];
      folds.push_back(s);
      if (std::isfinite(s)) {
        sum += s;
        ++ok;
      }
    }
    result.cell_scores(cell / n_eps, cell % n_eps) =
        ok > 0 ? sum / ok : std::numeric_limits<double>::infinity();
  }

  // argmin; ties go to the larger lambda, then the larger epsilon.
  Index best_l = 0, best_e = 0;
  for (Index l = 0; l < n_lam; ++l) {
    for (Index e = 0; e < n_eps; ++e) {
      const double s = result.cell_scores(l, e);
      const double b = result.cell_scores(best_l, best_e);
      const double lam = grid.lambdas[static_cast<std::size_t>(l)];
      const double eps = grid.epsilons[static_cast<std::size_t>(e)];
      const double blam = grid.lambdas[static_cast<std::size_t>(best_l)];
      const double beps = grid.epsilons[static_cast<std::size_t>(best_e)];
      if (s < b || (s == b && (lam > blam || (lam == blam && eps > beps)))) {
        best_l = l;
        best_e = e;
      }
    }
  }
  result.best_lambda = grid.lambdas[static_cast<std::size_t>(best_l)];
  result.best_epsilon = grid.epsilons[static_cast<std::size_t>(best_e)];
  result.best_score = result.cell_scores(best_l, best_e);
  return result;
}

Split split_indices(Index n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidArgument("train fraction must lie strictly between 0 and 1");
  const auto n_train = static_cast<Index>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n)
    throw InvalidArgument("split of " + std::to_string(n) + " samples at fraction " +
                          std::to_string(train_fraction) + " leaves an empty part");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  rng.shuffle(order);
  Split s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.test.assign(order.begin() + n_train, order.end());
  return s;
}

std::pair<Data, Data> train_test_split(const Data& data, double train_fraction,
                                       std::uint64_t seed) {
  const Split s = split_indices(data.count(), train_fraction, seed);
  return {data.subset(s.train), data.subset(s.test)};
}

ClassificationResult evaluate_classification(const Data& labelled, const CVGrid& grid,
                                             const FitConfig& base, double train_fraction,
                                             std::uint64_t split_seed) {
  const Data coded = labelled.with_responses(signed_coding(labelled.responses()));
  auto [train, test] = train_test_split(coded, train_fraction, split_seed);

  ClassificationResult out;
  out.n_train = train.count();
  out.n_test = test.count();
  out.cv = kfold_cv(train, grid, base);
  FitConfig cfg = base;
  cfg.lambda = out.cv.best_lambda;
  cfg.epsilon = out.cv.best_epsilon;
  out.model = fit(train, cfg);
  const Vector<double> scores = predict(out.model.factors, test.samples(), cfg.threads);
  out.test_auc = auc(scores, positive_flags(test.responses()));
  return out;
}

}  // namespace fastr
