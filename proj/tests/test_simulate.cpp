#include "doctest.h"

#include "fastr/eval.hpp"
#include "fastr/rng.hpp"
#include "fastr/simulate.hpp"

#include <cmath>

using namespace fastr;

namespace {

Index count_zeros(const Vector<double>& v) { return (v.array() == 0.0).count(); }

}  // namespace

TEST_CASE("Rng engine matches the standard mt19937_64 sequence") {
  // The C++ standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng(5489u);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next();
  CHECK(x == 9981545732273789042ull);
}

TEST_CASE("Rng transforms") {
  Rng rng(1);
  double sum = 0.0, sq = 0.0;
  constexpr int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1.0) < 0.05);

  for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7u);
}

TEST_CASE("gen_factors sparsity") {
  SUBCASE("s = 0 forces no zeros") {
    Rng rng(2);
    const Factors f = gen_factors({30, 20}, 0.0, rng);
    for (const auto& w : f.factors()) CHECK(count_zeros(w) == 0);
  }
  SUBCASE("s = 100 zeroes everything") {
    Rng rng(3);
    const Factors f = gen_factors({7, 3, 5}, 100.0, rng);
    for (const auto& w : f.factors()) CHECK(w.isZero(0));
  }
  SUBCASE("p = 10, s = 20 zeroes exactly two entries") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      CHECK(count_zeros(gen_factors({10}, 20.0, rng)[0]) == 2);
    }
  }
  SUBCASE("fractional counts round down") {
    CHECK(zeroed_count(7, 20.0) == 1);
    CHECK(zeroed_count(4, 20.0) == 0);
    CHECK(zeroed_count(5, 20.0) == 1);
    CHECK(zeroed_count(20, 20.0) == 4);
    CHECK(zeroed_count(3, 100.0) == 3);
  }
}

TEST_CASE("gen_dataset") {
  SUBCASE("noiseless responses are exact inner products") {
    const SimOutput sim = gen_dataset({{4, 3, 2}, 25, 20.0, 0.0, 8});
    CHECK(sim.true_tensor == outer_product(sim.true_factors));
    for (Index i = 0; i < sim.dataset.count(); ++i)
      CHECK(sim.dataset.responses()[i] ==
            inner_product(sim.true_tensor, sim.dataset.samples().sample(i)));
  }

  SUBCASE("a pure function of the spec") {
    const SimSpec spec{{6, 5}, 30, 20.0, 0.1, 9};
    const SimOutput a = gen_dataset(spec);
    const SimOutput b = gen_dataset(spec);
    CHECK(a.dataset == b.dataset);
    CHECK(a.true_factors == b.true_factors);
    CHECK(a.true_tensor == b.true_tensor);
    SimSpec other = spec;
    other.seed = 10;
    CHECK_FALSE(gen_dataset(other).dataset == a.dataset);
  }

  SUBCASE("noise enters with scale alpha") {
    const SimOutput clean = gen_dataset({{5, 4}, 200, 20.0, 0.0, 11});
    const SimOutput noisy = gen_dataset({{5, 4}, 200, 20.0, 0.5, 11});
    CHECK(clean.dataset.samples() == noisy.dataset.samples());
    const Vector<double> eps = (noisy.dataset.responses() - clean.dataset.responses()) / 0.5;
    CHECK(std::abs(eps.mean()) < 4.0 / std::sqrt(200.0));
    CHECK(std::abs(std::sqrt(eps.squaredNorm() / 200.0) - 1.0) < 0.2);
  }

  SUBCASE("response mean lies in a 4-sigma envelope") {
    const SimOutput sim = gen_dataset({{5, 5, 5}, 100, 20.0, 0.1, 12});
    // y_i = <W, X_i> + 0.1 e_i with X_i, e_i standard normal: Var y = ||W||^2 + 0.01.
    const double sd = std::sqrt(sim.true_tensor.data().squaredNorm() + 0.01);
    CHECK(std::abs(sim.dataset.responses().mean()) <= 4.0 * sd / std::sqrt(100.0));
  }

  SUBCASE("true tensor is at least as sparse as its factors") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const SimOutput sim = gen_dataset({{10, 6, 5}, 1, 30.0, 0.0, seed});
      const double tensor_frac = static_cast<double>(count_zeros(sim.true_tensor.data())) /
                                 static_cast<double>(sim.true_tensor.size());
      for (const auto& w : sim.true_factors.factors())
        CHECK(tensor_frac >= static_cast<double>(count_zeros(w)) / static_cast<double>(w.size()));
    }
  }

  SUBCASE("invalid specs") {
    CHECK_THROWS_AS(gen_dataset({{5, 5}, 10, 101.0, 0.1, 0}), InvalidArgument);
    CHECK_THROWS_AS(gen_dataset({{5, 5}, 10, -1.0, 0.1, 0}), InvalidArgument);
    CHECK_THROWS_AS(gen_dataset({{5, 5}, 0, 20.0, 0.1, 0}), InvalidArgument);
    CHECK_THROWS_AS(gen_dataset({{5, 5}, 10, 20.0, -0.1, 0}), InvalidArgument);
    CHECK_THROWS_AS(gen_dataset({{5, 0}, 10, 20.0, 0.1, 0}), ShapeError);
  }
}
