#include "doctest.h"

#include "oracles.hpp"

#include "fastr/tensor.hpp"

#include <limits>

using namespace fastr;

namespace {

Tensor mat2(double a, double b, double c, double d) {
  Vector<double> v(4);
  v << a, b, c, d;
  return Tensor({2, 2}, v);
}

Tensor random_tensor(oracle::Gen& g, const Shape& dims) {
  return Tensor(dims, oracle::to_eigen(g.vec(shape_size(dims))));
}

std::vector<std::vector<double>> random_factors(oracle::Gen& g, const Shape& dims) {
  std::vector<std::vector<double>> w;
  for (Index p : dims) w.push_back(g.vec(p));
  return w;
}

}  // namespace

TEST_CASE("DenseTensor construction enforces its invariants") {
  CHECK_THROWS_AS(Tensor(Shape{}), ShapeError);
  CHECK_THROWS_AS(Tensor(Shape{2, 0}), ShapeError);
  CHECK_THROWS_AS(Tensor({2, 2}, Vector<double>::Zero(3)), ShapeError);
  Vector<double> bad = Vector<double>::Zero(2);
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Tensor({2}, bad), NumericError);
  bad[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Tensor({2}, bad), NumericError);

  const Tensor t = mat2(1, 2, 3, 4);
  CHECK(t({0, 1}) == 2);
  CHECK(t({1, 0}) == 3);  // last index fastest
  CHECK_THROWS_AS(t({2, 0}), ShapeError);
}

TEST_CASE("FactorSet rejects empty and non-finite factors") {
  CHECK_THROWS_AS(Factors(std::vector<Vector<double>>{}), ShapeError);
  CHECK_THROWS_AS(Factors({Vector<double>(0)}), ShapeError);
  Vector<double> w(2);
  w << 1, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Factors({w}), NumericError);
  Factors f = Factors::zeros({2, 3});
  CHECK_THROWS_AS(f.set(0, Vector<double>::Zero(3)), ShapeError);
}

TEST_CASE("inner_product") {
  const Tensor id = mat2(1, 0, 0, 1);
  CHECK(inner_product(id, id) == 2);
  CHECK(inner_product(mat2(1, 2, 3, 4), Tensor({2, 2})) == 0);
  CHECK(inner_product(mat2(1, 2, 3, 4), mat2(5, 6, 7, 8)) == 70);
  CHECK_THROWS_AS(inner_product(id, Tensor({4})), ShapeError);
}

TEST_CASE("outer_product") {
  Vector<double> a(2), b(2);
  a << 1, 2;
  b << 3, 4;
  CHECK(outer_product(Factors({a, b})) == mat2(3, 4, 6, 8));

  const Vector<double> one = Vector<double>::Ones(1);
  const Tensor unit = outer_product(Factors({one, one, one}));
  CHECK(unit.dims() == Shape{1, 1, 1});
  CHECK(unit.data()[0] == 1);

  const Tensor z = outer_product(Factors({a, Vector<double>::Zero(3), b}));
  CHECK(z.dims() == Shape{2, 3, 2});
  CHECK(z.data().isZero(0));
}

TEST_CASE("mode_contract") {
  const Tensor t = mat2(1, 2, 3, 4);
  Vector<double> e1(2), ones(2);
  e1 << 1, 0;
  ones << 1, 1;

  const Tensor slice = mode_contract(t, e1, 1);
  CHECK(slice.dims() == Shape{2});
  CHECK(slice.data() == (Vector<double>(2) << 1, 3).finished());

  const Tensor sums = mode_contract(t, ones, 0);
  CHECK(sums.data() == (Vector<double>(2) << 4, 6).finished());

  const Tensor zero = mode_contract(t, Vector<double>::Zero(2), 0);
  CHECK(zero.dims() == Shape{2});
  CHECK(zero.data().isZero(0));

  SUBCASE("1-mode tensor contracts to a 1-element tensor") {
    const Tensor v({3}, (Vector<double>(3) << 1, 2, 3).finished());
    const Tensor s = mode_contract(v, Vector<double>::Ones(3), 0);
    CHECK(s.dims() == Shape{1});
    CHECK(s.data()[0] == 6);
  }

  CHECK_THROWS_AS(mode_contract(t, Vector<double>::Ones(3), 0), ShapeError);
  CHECK_THROWS_AS(mode_contract(t, ones, 2), ShapeError);
  CHECK_THROWS_AS(mode_contract(t, ones, -1), ShapeError);
}

TEST_CASE("mode_contract matches the brute-force oracle") {
  oracle::Gen g(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Shape dims = g.shape(4, 5);
    const auto data = g.vec(shape_size(dims));
    const Index mode = g.between(0, static_cast<Index>(dims.size()) - 1);
    const auto v = g.vec(dims[static_cast<std::size_t>(mode)]);
    const Tensor got = mode_contract(Tensor(dims, oracle::to_eigen(data)), oracle::to_eigen(v), mode);
    CHECK(oracle::max_abs_diff(oracle::mode_contract(data, dims, v, mode), got.data()) <= 1e-12);
  }
}

TEST_CASE("contractions along distinct modes commute") {
  oracle::Gen g(12);
  for (int trial = 0; trial < 100; ++trial) {
    Shape dims = g.shape(4, 5);
    if (dims.size() < 2) dims.push_back(3);
    const Tensor t = random_tensor(g, dims);
    const Index order = static_cast<Index>(dims.size());
    const Index a = g.between(0, order - 2);
    const Index b = g.between(a + 1, order - 1);
    const auto va = oracle::to_eigen(g.vec(dims[static_cast<std::size_t>(a)]));
    const auto vb = oracle::to_eigen(g.vec(dims[static_cast<std::size_t>(b)]));
    // a first shifts b down by one; b first leaves a in place.
    const Tensor ab = mode_contract(mode_contract(t, va, a), vb, b - 1);
    const Tensor ba = mode_contract(mode_contract(t, vb, b), va, a);
    REQUIRE(ab.dims() == ba.dims());
    CHECK((ab.data() - ba.data()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("projection") {
  SUBCASE("one mode: identity on the samples") {
    oracle::Gen g(3);
    const Shape dims{4};
    const SampleSet x = oracle::to_samples({g.vec(4), g.vec(4), g.vec(4)}, dims);
    const auto p = projection(x, oracle::to_factors({g.vec(4)}), 0);
    CHECK(p == x.rows());
  }

  SUBCASE("basis factors select a fiber") {
    oracle::Gen g(4);
    const Shape dims{3, 4, 2};
    const SampleSet x = oracle::to_samples({g.vec(24), g.vec(24)}, dims);
    std::vector<double> e_b(4, 0.0), e_c(2, 0.0);
    e_b[2] = 1.0;
    e_c[1] = 1.0;
    const auto p = projection(x, oracle::to_factors({g.vec(3), e_b, e_c}), 0);
    for (Index i = 0; i < 2; ++i)
      for (Index a = 0; a < 3; ++a) CHECK(p(i, a) == x.sample(i)({a, 2, 1}));
  }

  SUBCASE("random 2x3x4 instance against the nested-loop oracle") {
    oracle::Gen g(5);
    const Shape dims{2, 3, 4};
    std::vector<std::vector<double>> xs;
    for (int i = 0; i < 7; ++i) xs.push_back(g.vec(24));
    const auto w = random_factors(g, dims);
    const auto p = projection(oracle::to_samples(xs, dims), oracle::to_factors(w), 0);
    const auto ref = oracle::projection(xs, dims, w, 0);
    for (Index i = 0; i < 7; ++i)
      CHECK(oracle::max_abs_diff(ref[static_cast<std::size_t>(i)], p.row(i).transpose()) <= 1e-12);
  }

  SUBCASE("independent of thread count") {
    oracle::Gen g(6);
    const Shape dims{3, 5, 4};
    std::vector<std::vector<double>> xs;
    for (int i = 0; i < 37; ++i) xs.push_back(g.vec(60));
    const SampleSet x = oracle::to_samples(xs, dims);
    const Factors f = oracle::to_factors(random_factors(g, dims));
    for (Index m = 0; m < 3; ++m) {
      const auto serial = projection(x, f, m, 1);
      CHECK(projection(x, f, m, 3) == serial);
      CHECK(projection(x, f, m, 8) == serial);
    }
  }

  SUBCASE("linear in the sample") {
    oracle::Gen g(7);
    const Shape dims{3, 3, 2};
    const auto xs = std::vector<std::vector<double>>{g.vec(18), g.vec(18)};
    const SampleSet x = oracle::to_samples(xs, dims);
    const SampleSet x3(dims, x.rows() * 3.0);
    const Factors f = oracle::to_factors(random_factors(g, dims));
    CHECK((projection(x3, f, 1) - 3.0 * projection(x, f, 1)).cwiseAbs().maxCoeff() <= 1e-12);
  }

  CHECK_THROWS_AS(projection(oracle::to_samples({{1, 2, 3, 4}}, {2, 2}), Factors::zeros({2, 3}), 0),
                  ShapeError);
  CHECK_THROWS_AS(projection(oracle::to_samples({{1, 2, 3, 4}}, {2, 2}), Factors::zeros({2, 2}), 2),
                  ShapeError);
}

TEST_CASE("frobenius_norm") {
  CHECK(frobenius_norm(Tensor({3, 2})) == 0);
  CHECK(frobenius_norm(Tensor({1}, (Vector<double>(1) << -3).finished())) == 3);
  CHECK(frobenius_norm(Tensor({1, 2}, (Vector<double>(2) << 3, 4).finished())) == 5);
}

TEST_CASE("unit-rank identities on random instances") {
  oracle::Gen g(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Shape dims = g.shape(4, 5);
    const auto w = random_factors(g, dims);
    const Factors f = oracle::to_factors(w);
    const Tensor full = outer_product(f);

    double norms = 1.0;
    for (const auto& v : w) norms *= oracle::to_eigen(v).norm();
    CHECK(std::abs(frobenius_norm(full) - norms) <= 1e-10 * std::max(1.0, norms));

    const Tensor x = random_tensor(g, dims);
    const Tensor y = random_tensor(g, dims);
    CHECK(inner_product(x, y) == doctest::Approx(inner_product(y, x)).epsilon(1e-14));

    // <w1 o ... o wM, X> equals X contracted by every factor, last mode first.
    Tensor c = x;
    for (Index m = static_cast<Index>(dims.size()) - 1; m >= 0; --m) c = mode_contract(c, f[m], m);
    CHECK(std::abs(inner_product(full, x) - c.data()[0]) <= 1e-10);
  }
}
