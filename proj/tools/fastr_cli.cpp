// fastr: sparse unit-rank tensor regression from the command line.
//
//   fastr simulate --dims 20,20 --n 40 --sparsity 20 --alpha 0.1 --seed 7 --out-dir run/
//   fastr cv       --data run/dataset.ftrt --responses run/responses.csv --out cv.csv
//   fastr fit      --data ... --responses ... --lambda 0.1 --epsilon 1 --model model.json
//   fastr predict  --model model.json --data ... --out yhat.csv
//   fastr eval     --model model.json --data ... --responses ... [--true-tensor t.ftrt] --out yhat.csv
//   fastr bench    --cubes 5,10,15,20 --order 3 --n 100 --iters 10 --out bench.csv
//
// Exit status: 0 success, 1 usage error, 2 data/format error, 3 numeric failure.

#include "manifest.hpp"

#include "fastr/bench.hpp"
#include "fastr/errors.hpp"
#include "fastr/estimator.hpp"
#include "fastr/eval.hpp"
#include "fastr/io.hpp"
#include "fastr/simulate.hpp"
#include "fastr/version.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using fastr::io::format_double;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

template <typename T>
std::vector<T> parse_list(const std::string& text, char sep = ',') {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    std::size_t used = 0;
    T v{};
    try {
      if constexpr (std::is_floating_point_v<T>) {
        v = static_cast<T>(std::stod(item, &used));
      } else {
        v = static_cast<T>(std::stoll(item, &used));
      }
    } catch (const std::exception&) {
      throw fastr::InvalidArgument("cannot parse list item '" + item + "'");
    }
    if (used != item.size()) throw fastr::InvalidArgument("cannot parse list item '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw fastr::InvalidArgument("empty list '" + text + "'");
  return out;
}

fs::path sidecar(const fs::path& p, const std::string& suffix) {
  return fs::path(p.string() + suffix);
}

struct HyperArgs {
  double lambda = 0.0;
  double epsilon = 1.0;
  int max_iter = 1000;
  double tol = 1e-3;
  std::uint64_t seed = 0;
  bool balance = false;
  int threads = 1;

  void add_to(CLI::App* app, bool with_grid_params) {
    if (with_grid_params) {
      app->add_option("--lambda", lambda, "Sparsity threshold (>= 0)")->capture_default_str();
      app->add_option("--epsilon", epsilon, "Ridge perturbation (> 0)")->capture_default_str();
    }
    app->add_option("--max-iter", max_iter, "Sweep cap")->capture_default_str();
    app->add_option("--tol", tol, "Relative Frobenius change stopping threshold")
        ->capture_default_str();
    app->add_option("--seed", seed, "Initialization / fold seed")->capture_default_str();
    app->add_flag("--balance", balance, "Rescale factors to equal norm after each sweep");
    app->add_option("--threads", threads, "Degree-of-parallelism hint")->capture_default_str();
  }

  fastr::FitConfig config() const {
    fastr::FitConfig cfg;
    cfg.lambda = lambda;
    cfg.epsilon = epsilon;
    cfg.max_iter = max_iter;
    cfg.tol = tol;
    cfg.seed = seed;
    cfg.balance = balance;
    cfg.threads = threads;
    cfg.validate();
    return cfg;
  }
};

nlohmann::json config_json(const fastr::FitConfig& cfg) {
  return {{"lambda", cfg.lambda},   {"epsilon", cfg.epsilon}, {"max_iter", cfg.max_iter},
          {"tol", cfg.tol},         {"seed", cfg.seed},       {"balance", cfg.balance},
          {"threads", cfg.threads}};
}

fastr::Data load_dataset(const fs::path& data, const fs::path& responses, bool signed_labels) {
  fastr::SampleSet x = fastr::io::read_samples_file(data);
  fastr::Vector<double> y = fastr::io::read_column_csv(responses);
  if (y.size() != x.count())
    throw fastr::FormatError(data.string() + " holds " + std::to_string(x.count()) +
                             " samples but " + responses.string() + " holds " +
                             std::to_string(y.size()) + " responses");
  if (signed_labels) y = fastr::signed_coding(y);
  return fastr::Data(std::move(x), std::move(y));
}

// ---------------------------------------------------------------------------

struct SimulateCmd {
  std::string dims;
  long long n = 0;
  double sparsity = 20.0;
  double alpha = 0.1;
  std::uint64_t seed = 0;
  fs::path out_dir = ".";

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("simulate", "Generate a synthetic sparse unit-rank dataset");
    app->add_option("--dims", dims, "Sample shape, e.g. 20,20 or 5,5,5")->required();
    app->add_option("--n", n, "Number of samples")->required();
    app->add_option("--sparsity", sparsity, "Percent of each factor set to zero [0,100]")
        ->capture_default_str();
    app->add_option("--alpha", alpha, "Noise scale")->capture_default_str();
    app->add_option("--seed", seed, "RNG seed")->capture_default_str();
    app->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() {
    fastr::SimSpec spec;
    spec.dims = parse_list<fastr::Index>(dims);
    for (fastr::Index p : spec.dims)
      if (p < 1) throw fastr::InvalidArgument("--dims entries must be >= 1");
    spec.n_samples = n;
    spec.sparsity_pct = sparsity;
    spec.noise_alpha = alpha;
    spec.seed = seed;
    spec.validate();

    fastr::cli::RunManifest manifest("simulate");
    manifest.config() = {{"dims", spec.dims},          {"n", spec.n_samples},
                         {"sparsity", spec.sparsity_pct}, {"alpha", spec.noise_alpha},
                         {"seed", spec.seed}};
    manifest.begin_phase("generate");
    const fastr::SimOutput sim = fastr::gen_dataset(spec);

    manifest.begin_phase("write");
    fs::create_directories(out_dir);
    const auto data = out_dir / "dataset.ftrt";
    const auto resp = out_dir / "responses.csv";
    const auto factors = out_dir / "true_factors.ftrt";
    const auto tensor = out_dir / "true_tensor.ftrt";
    fastr::io::write_samples_file(data, sim.dataset.samples());
    fastr::io::write_column_csv(resp, "y", sim.dataset.responses());
    fastr::io::write_factors_file(factors, sim.true_factors);
    fastr::io::write_tensor_file(tensor, sim.true_tensor);
    manifest.output("dataset", data);
    manifest.output("responses", resp);
    manifest.output("true_factors", factors);
    manifest.output("true_tensor", tensor);
    manifest.write(out_dir / "manifest.json");
    std::cout << "wrote " << sim.dataset.count() << " samples of shape "
              << fastr::shape_string(spec.dims) << " to " << out_dir.string() << '\n';
  }
};

struct FitCmd {
  fs::path data, responses, model, trace;
  bool labels = false;
  HyperArgs hyper;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("fit", "Fit a sparse unit-rank model");
    app->add_option("--data", data, "Dataset FTRT file")->required();
    app->add_option("--responses", responses, "Responses CSV")->required();
    app->add_option("--model", model, "Output model file (JSON)")->required();
    app->add_option("--trace", trace, "Convergence trace CSV (default <model>.trace.csv)");
    app->add_flag("--labels", labels, "Responses are binary labels; fit their +1/-1 coding");
    hyper.add_to(app, true);
    app->callback([this] { run(); });
  }

  void run() {
    const fastr::FitConfig cfg = hyper.config();
    if (trace.empty()) trace = sidecar(model, ".trace.csv");
    fastr::cli::RunManifest manifest("fit");
    manifest.config() = config_json(cfg);
    manifest.config()["labels"] = labels;
    manifest.input("data", data);
    manifest.input("responses", responses);

    manifest.begin_phase("load");
    const fastr::Data ds = load_dataset(data, responses, labels);
    manifest.begin_phase("fit");
    fastr::PhaseTimings phases;
    const auto report = fastr::fit(ds, cfg, &phases);
    manifest.begin_phase("write");
    fastr::io::write_model(model, report, cfg);
    {
      std::ofstream out(trace, std::ios::trunc);
      if (!out) throw fastr::FormatError("cannot write " + trace.string());
      out << "iteration,rel_change\n";
      for (std::size_t t = 0; t < report.rel_change_trace.size(); ++t)
        out << (t + 1) << ',' << format_double(report.rel_change_trace[t]) << '\n';
    }
    manifest.add_timing("fit.projection", phases.projection);
    manifest.add_timing("fit.solve", phases.solve);
    manifest.add_timing("fit.threshold", phases.threshold);
    manifest.add_timing("fit.stopping", phases.stopping);
    manifest.output("model", model);
    manifest.output("trace", trace);
    manifest.write(sidecar(model, ".manifest.json"));

    const auto y_hat = fastr::predict(report.factors, ds.samples(), cfg.threads);
    std::cout << "iterations=" << report.iterations
              << " converged=" << (report.converged ? "true" : "false")
              << " train_mse=" << format_double(fastr::mse(y_hat, ds.responses())) << '\n';
  }
};

struct PredictCmd {
  fs::path model, data, out;
  int threads = 1;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("predict", "Predict responses with a fitted model");
    app->add_option("--model", model, "Model file")->required();
    app->add_option("--data", data, "Dataset FTRT file")->required();
    app->add_option("--out", out, "Predictions CSV")->required();
    app->add_option("--threads", threads, "Degree-of-parallelism hint")->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() {
    if (threads < 1) throw fastr::InvalidArgument("--threads must be >= 1");
    fastr::cli::RunManifest manifest("predict");
    manifest.config() = {{"threads", threads}};
    manifest.input("model", model);
    manifest.input("data", data);
    manifest.begin_phase("load");
    const auto report = fastr::io::read_model(model);
    const auto x = fastr::io::read_samples_file(data);
    manifest.begin_phase("predict");
    const auto y_hat = fastr::predict(report.factors, x, threads);
    manifest.begin_phase("write");
    fastr::io::write_column_csv(out, "y_hat", y_hat);
    manifest.output("predictions", out);
    manifest.write(sidecar(out, ".manifest.json"));
  }
};

struct EvalCmd {
  fs::path model, data, responses, true_tensor, out;
  int threads = 1;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("eval", "Predict and score against known responses");
    app->add_option("--model", model, "Model file")->required();
    app->add_option("--data", data, "Dataset FTRT file")->required();
    app->add_option("--responses", responses, "Responses or binary labels CSV")->required();
    app->add_option("--true-tensor", true_tensor, "Ground-truth coefficient FTRT file");
    app->add_option("--out", out, "Predictions CSV")->required();
    app->add_option("--threads", threads, "Degree-of-parallelism hint")->capture_default_str();
    app->callback([this] { run(); });
  }

  void run() {
    if (threads < 1) throw fastr::InvalidArgument("--threads must be >= 1");
    fastr::cli::RunManifest manifest("eval");
    manifest.config() = {{"threads", threads}};
    manifest.input("model", model);
    manifest.input("data", data);
    manifest.input("responses", responses);
    manifest.begin_phase("load");
    const auto report = fastr::io::read_model(model);
    const fastr::Data ds = load_dataset(data, responses, false);
    manifest.begin_phase("predict");
    const auto y_hat = fastr::predict(report.factors, ds.samples(), threads);
    manifest.begin_phase("score");

    // Binary labels are scored against their +1/-1 coding, the target the
    // model was fit to.
    const bool binary = fastr::is_binary(ds.responses());
    const auto target = binary ? fastr::signed_coding(ds.responses()) : ds.responses();
    std::string summary = "mse=" + format_double(fastr::mse(y_hat, target));
    if (!true_tensor.empty()) {
      manifest.input("true_tensor", true_tensor);
      const auto truth = fastr::io::read_tensor_file(true_tensor);
      const auto w_hat = fastr::outer_product(report.factors);
      summary += " ce=" + format_double(fastr::coefficient_error(w_hat, truth));
    }
    if (binary) {
      const auto pos = fastr::positive_flags(ds.responses());
      const bool both = std::find(pos.begin(), pos.end(), true) != pos.end() &&
                        std::find(pos.begin(), pos.end(), false) != pos.end();
      if (both) summary += " auc=" + format_double(fastr::auc(y_hat, pos));
    }
    manifest.begin_phase("write");
    fastr::io::write_column_csv(out, "y_hat", y_hat);
    manifest.output("predictions", out);
    manifest.config()["summary"] = summary;
    manifest.write(sidecar(out, ".manifest.json"));
    std::cout << summary << '\n';
  }
};

struct CvCmd {
  fs::path data, responses, out;
  std::string lambdas, epsilons;
  int k = 5;
  bool labels = false;
  HyperArgs hyper;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("cv", "Select (lambda, epsilon) by k-fold cross-validation");
    app->add_option("--data", data, "Dataset FTRT file")->required();
    app->add_option("--responses", responses, "Responses CSV")->required();
    app->add_option("--out", out, "Long-form CSV: lambda,epsilon,fold,mse")->required();
    app->add_option("--lambdas", lambdas, "Comma-separated lambda grid (default 1e-4..1e1, 7 pts)");
    app->add_option("--epsilons", epsilons,
                    "Comma-separated epsilon grid (default 1e-3..1e2, 6 pts)");
    app->add_option("--k", k, "Fold count")->capture_default_str();
    app->add_flag("--labels", labels, "Responses are binary labels; fit their +1/-1 coding");
    hyper.add_to(app, false);
    app->callback([this] { run(); });
  }

  void run() {
    fastr::CVGrid grid = fastr::CVGrid::defaults();
    if (!lambdas.empty()) grid.lambdas = parse_list<double>(lambdas);
    if (!epsilons.empty()) grid.epsilons = parse_list<double>(epsilons);
    grid.k = k;
    const fastr::FitConfig base = hyper.config();

    fastr::cli::RunManifest manifest("cv");
    manifest.config() = config_json(base);
    manifest.config()["lambdas"] = grid.lambdas;
    manifest.config()["epsilons"] = grid.epsilons;
    manifest.config()["k"] = grid.k;
    manifest.config()["labels"] = labels;
    manifest.input("data", data);
    manifest.input("responses", responses);
    manifest.begin_phase("load");
    const fastr::Data ds = load_dataset(data, responses, labels);
    grid.validate(ds.count());
    manifest.begin_phase("cv");
    const auto res = fastr::kfold_cv(ds, grid, base);
    manifest.begin_phase("write");
    {
      std::ofstream csv(out, std::ios::trunc);
      if (!csv) throw fastr::FormatError("cannot write " + out.string());
      csv << "lambda,epsilon,fold,mse\n";
      const std::size_t n_eps = grid.epsilons.size();
      for (std::size_t cell = 0; cell < res.fold_scores.size(); ++cell)
        for (std::size_t f = 0; f < res.fold_scores[cell].size(); ++f)
          csv << format_double(grid.lambdas[cell / n_eps]) << ','
              << format_double(grid.epsilons[cell % n_eps]) << ',' << f << ','
              << format_double(res.fold_scores[cell][f]) << '\n';
    }
    manifest.output("scores", out);
    const std::string summary = "best_lambda=" + format_double(res.best_lambda) +
                                " best_epsilon=" + format_double(res.best_epsilon) +
                                " cv_mse=" + format_double(res.best_score);
    manifest.config()["summary"] = summary;
    manifest.write(sidecar(out, ".manifest.json"));
    std::cout << summary << '\n';
  }
};

struct BenchCmd {
  std::string cubes = "5,10,15,20";
  std::string shapes;
  long long order = 3;
  fastr::BenchOptions opts;
  fs::path out;

  void add(CLI::App& root) {
    auto* app = root.add_subcommand("bench", "Time fit phases over a ladder of shapes");
    app->add_option("--cubes", cubes, "Cube edge lengths")->capture_default_str();
    app->add_option("--order", order, "Cube order")->capture_default_str();
    app->add_option("--shapes", shapes, "Explicit ladder, e.g. 10x10;20x20 (overrides --cubes)");
    app->add_option("--n", opts.n_samples, "Samples per rung")->capture_default_str();
    app->add_option("--iters", opts.iterations, "Sweeps per fit")->capture_default_str();
    app->add_option("--repeats", opts.repeats, "Timed repeats per rung (min kept)")
        ->capture_default_str();
    app->add_option("--lambda", opts.lambda, "Sparsity threshold")->capture_default_str();
    app->add_option("--epsilon", opts.epsilon, "Ridge perturbation")->capture_default_str();
    app->add_option("--seed", opts.seed, "RNG seed")->capture_default_str();
    app->add_option("--threads", opts.threads, "Degree-of-parallelism hint")->capture_default_str();
    app->add_option("--out", out, "Timings CSV")->required();
    app->callback([this] { run(); });
  }

  void run() {
    std::vector<fastr::Shape> ladder;
    if (!shapes.empty()) {
      std::stringstream ss(shapes);
      std::string item;
      while (std::getline(ss, item, ';'))
        if (!item.empty()) ladder.push_back(parse_list<fastr::Index>(item, 'x'));
    } else {
      ladder = fastr::cube_ladder(parse_list<fastr::Index>(cubes), order);
    }
    for (const auto& d : ladder) fastr::check_shape(d);
    if (opts.n_samples < 1) throw fastr::InvalidArgument("--n must be >= 1");

    fastr::cli::RunManifest manifest("bench");
    nlohmann::json ladder_json = nlohmann::json::array();
    for (const auto& d : ladder) ladder_json.push_back(fastr::shape_string(d));
    manifest.config() = {{"ladder", ladder_json}, {"n", opts.n_samples},
                         {"iters", opts.iterations}, {"repeats", opts.repeats},
                         {"lambda", opts.lambda},   {"epsilon", opts.epsilon},
                         {"seed", opts.seed},       {"threads", opts.threads}};
    manifest.begin_phase("bench");
    const auto rows = fastr::run_bench(ladder, opts);
    manifest.begin_phase("write");
    std::ofstream csv(out, std::ios::trunc);
    if (!csv) throw fastr::FormatError("cannot write " + out.string());
    csv << "shape,n,iterations,projection_work,projection_s,solve_s,threshold_s,stopping_s,"
           "total_s\n";
    for (const auto& r : rows)
      csv << fastr::shape_string(r.dims) << ',' << r.n_samples << ',' << r.iterations << ','
          << r.projection_work << ',' << format_double(r.timings.projection) << ','
          << format_double(r.timings.solve) << ',' << format_double(r.timings.threshold) << ','
          << format_double(r.timings.stopping) << ',' << format_double(r.total) << '\n';
    csv.close();
    manifest.output("timings", out);
    manifest.write(sidecar(out, ".manifest.json"));
    std::cout << "benchmarked " << rows.size() << " shapes\n";
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fastr: sparse unit-rank tensor regression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fastr::kVersion));

  SimulateCmd simulate;
  FitCmd fit;
  PredictCmd predict;
  EvalCmd eval;
  CvCmd cv;
  BenchCmd bench;
  simulate.add(app);
  fit.add(app);
  predict.add(app);
  eval.add(app);
  cv.add(app);
  bench.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  } catch (const fastr::InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const fastr::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const fastr::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
