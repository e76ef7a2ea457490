#include <cmath>
#include <random>

#include "doctest.h"
#include "rnf/resonance.hpp"
#include "rnf/textio.hpp"
#include "support.hpp"

using namespace rnf;
using namespace rnf::test;

namespace {

std::vector<Complex> random_point(std::mt19937_64& rng, std::size_t n, double scale = 0.7) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Complex> x(n);
  for (auto& v : x) v = {u(rng), u(rng)};
  return x;
}

ScalarSeries<GR> random_series(const TruncationContext& ctx, std::mt19937_64& rng, int terms, int maxdeg) {
  ScalarSeries<GR> f(ctx);
  auto modes = ctx.modes();
  std::uniform_int_distribution<int> deg(1, maxdeg);
  for (int t = 0; t < terms; ++t) f.add_term(random_index(rng, modes, deg(rng)), random_gr(rng));
  return f;
}

}  // namespace

TEST_CASE("lie derivative examples") {
  auto ctx = TruncationContext::finite(2, 4);
  VectorField<GR> D(ctx);
  D.add_term(fk(1), MultiIndex::unit(fk(1)), GR(2));
  D.add_term(fk(2), MultiIndex::unit(fk(2)), GR(1));
  ScalarSeries<GR> f(ctx);
  f.add_term(MultiIndex{{fk(1), 1}, {fk(2), 1}}, GR(1));
  auto g = lie_derivative(D, f);
  CHECK(g.size() == 1);
  CHECK(g.coefficient(MultiIndex{{fk(1), 1}, {fk(2), 1}}) == GR(3));

  VectorField<GR> X(ctx);
  X.add_term(fk(1), MultiIndex::unit(fk(2), 2), GR(1));
  ScalarSeries<GR> x1(ctx);
  x1.add_term(MultiIndex::unit(fk(1)), GR(1));
  auto h = lie_derivative(X, x1);
  CHECK(h.size() == 1);
  CHECK(h.coefficient(MultiIndex::unit(fk(2), 2)) == GR(1));
}

TEST_CASE("lie derivative against pointwise evaluation") {
  auto ctx = TruncationContext::finite(4, 12);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    auto X = random_field(ctx, rng, 8, 0, 3);
    auto f = random_series(ctx, rng, 8, 4);
    auto g = lie_derivative(X, f);
    REQUIRE_FALSE(g.truncated());
    for (int p = 0; p < 20; ++p) {
      auto x = random_point(rng, 4);
      auto Xx = evaluate(X, x);
      // sum_k X^k(x) df/dx_k(x) by central differences along complex directions
      Complex expect = 0.0;
      const double h = 1e-4;
      for (std::size_t k = 0; k < 4; ++k) {
        auto xp = x, xm = x, xp2 = x, xm2 = x;
        xp[k] += h;
        xm[k] -= h;
        xp2[k] += 2 * h;
        xm2[k] -= 2 * h;
        Complex df = (8.0 * (evaluate(f, xp) - evaluate(f, xm)) - (evaluate(f, xp2) - evaluate(f, xm2))) / (12 * h);
        expect += Xx[k] * df;
      }
      CHECK(std::abs(evaluate(g, x) - expect) <= 1e-7 * (1 + std::abs(expect)));
    }
  }
}

TEST_CASE("bracket examples") {
  auto ctx = TruncationContext::finite(6, 4);
  auto model = dim6_model();
  auto D = linear_field<GR>(model, ctx);
  CHECK(bracket(D, D).is_zero());

  auto c2 = TruncationContext::finite(2, 3);
  VectorField<GR> A(c2), B(c2), expect(c2);
  A.add_term(fk(2), MultiIndex::unit(fk(1)), GR(1));
  B.add_term(fk(1), MultiIndex::unit(fk(2)), GR(1));
  expect.add_term(fk(1), MultiIndex::unit(fk(1)), GR(1));
  expect.add_term(fk(2), MultiIndex::unit(fk(2)), GR(-1));
  CHECK(bracket(A, B) == expect);

  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    auto X = random_field(ctx, rng, 1, 1, 3);
    const auto& [key, c] = *X.terms().begin();
    auto div = model.exact(model.divisor(key.q, key.k));
    VectorField<GR> e(ctx);
    e.add_term(key.k, key.q, c * div);
    CHECK(bracket(D, X) == e);
  }
}

TEST_CASE("bracket agrees with the dense oracle") {
  auto ctx = TruncationContext::finite(3, 5);
  std::mt19937_64 rng(17);
  for (int t = 0; t < 30; ++t) {
    auto X = random_field(ctx, rng, 6, 0, 3);
    auto Y = random_field(ctx, rng, 6, 0, 3);
    CHECK(to_dense(bracket(X, Y)) == dense_bracket(to_dense(X), to_dense(Y), 5));
  }
}

TEST_CASE("lie algebra identities on 3-variable fields") {
  auto ctx = TruncationContext::finite(3, 6);
  std::mt19937_64 rng(23);
  for (int t = 0; t < 25; ++t) {
    auto X = random_field(ctx, rng, 5, 0, 2);
    auto Y = random_field(ctx, rng, 5, 0, 2);
    auto Z = random_field(ctx, rng, 5, 0, 2);
    CHECK(bracket(X, Y) == -bracket(Y, X));
    auto jac = bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X)) + bracket(Z, bracket(X, Y));
    CHECK(jac.is_zero());
  }
}

TEST_CASE("momentum closure of the bracket") {
  auto ctx = TruncationContext::lattice(3, 5, true);
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    auto X = random_field(ctx, rng, 6, 1, 2);
    auto Y = random_field(ctx, rng, 6, 1, 2);
    auto B = bracket(X, Y);
    for (const auto& [key, c] : B.terms()) CHECK(momentum(key.q, ctx) == ctx.momentum(key.k));
  }
  VectorField<GR> bad(ctx);
  CHECK_THROWS_AS(bad.add_term(ModeKey{1, 1}, MultiIndex{{ModeKey{2, 1}, 1}, {ModeKey{0, 1}, 1}}, GR(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(bad.add_term(ModeKey{4, 1}, MultiIndex::unit(ModeKey{4, 1}), GR(1)), std::invalid_argument);
  CHECK_THROWS_AS(bad.add_term(ModeKey{1, 1}, MultiIndex{}, GR(1)), std::invalid_argument);
}

TEST_CASE("leibniz rule up to the degree cut") {
  auto ctx = TruncationContext::finite(3, 12);
  std::mt19937_64 rng(37);
  for (int t = 0; t < 10; ++t) {
    auto X = random_field(ctx, rng, 4, 0, 2);
    auto f = random_series(ctx, rng, 4, 3);
    auto g = random_series(ctx, rng, 4, 3);
    auto lhs = lie_derivative(X, multiply(f, g));
    auto rhs = multiply(lie_derivative(X, f), g);
    rhs += multiply(f, lie_derivative(X, g));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("degree projections") {
  auto ctx = TruncationContext::finite(6, 6);
  VectorField<GR> X(ctx), a(ctx), b(ctx);
  a.add_term(fk(1), MultiIndex::unit(fk(2), 2), GR(1));
  b.add_term(fk(1), MultiIndex{{fk(1), 1}, {fk(3), 1}, {fk(4), 1}}, GR(1));
  X = a + b;
  CHECK(project_degree(X, 1) == a);
  CHECK(project_degree(a, 1) == a);
  CHECK(project_degree(a, 2).is_zero());

  std::mt19937_64 rng(41);
  auto R = random_field(ctx, rng, 30, 0, 6);
  VectorField<GR> sum(ctx);
  for (int d = 0; d <= 6; ++d) {
    auto P = project_degree(R, d);
    CHECK(project_degree(P, d) == P);
    sum += P;
  }
  CHECK(sum == R);
  CHECK(project_degree_range(R, 2, 4) == project_degree(R, 2) + project_degree(R, 3) + project_degree(R, 4));
}

TEST_CASE("set projections and diagonal split") {
  auto ctx = TruncationContext::finite(6, 6);
  std::mt19937_64 rng(43);
  auto R = random_field(ctx, rng, 30, 0, 5);
  CHECK(project_set(R, [](const MultiIndex&, ModeKey) { return true; }) == R);
  CHECK(project_set(R, [](const MultiIndex&, ModeKey) { return false; }).is_zero());
  auto even = [](const MultiIndex& q, ModeKey) { return q.total() % 2 == 0; };
  auto odd = [](const MultiIndex& q, ModeKey) { return q.total() % 2 == 1; };
  auto E = project_set(R, even);
  CHECK(project_set(E, even) == E);
  CHECK(E + project_set(R, odd) == R);
  CHECK(majorant_norm(E, 0.5, 0.0).upper <= majorant_norm(R, 0.5, 0.0).upper + 1e-15);

  VectorField<GR> a(ctx), b(ctx);
  a.add_term(fk(1), MultiIndex{{fk(1), 1}, {fk(3), 1}, {fk(4), 1}}, GR(1));
  b.add_term(fk(1), MultiIndex::unit(fk(2), 2), GR(1));
  auto [diag, out] = split_diagonal(a + b);
  CHECK(diag == a);
  CHECK(out == b);
  auto [d2, o2] = split_diagonal(R);
  CHECK(d2 + o2 == R);
  for (const auto& [key, c] : d2.terms()) CHECK(key.q[key.k] >= 1);
  for (const auto& [key, c] : o2.terms()) CHECK(key.q[key.k] == 0);
}

TEST_CASE("majorant norm") {
  auto ctx = TruncationContext::lattice(4, 6, true);
  VectorField<GR> single(ctx);
  single.add_term(ModeKey{2, 1}, MultiIndex::unit(ModeKey{2, 1}), GR(1));
  for (double r : {0.1, 1.0}) {
    auto n = majorant_norm(single, r, 0.3);
    CHECK(n.upper == doctest::Approx(1.0));
    CHECK(n.lower == doctest::Approx(1.0));
  }

  std::mt19937_64 rng(47);
  auto X = random_field(ctx, rng, 10, 2, 2);
  auto n1 = majorant_norm(X, 0.5, 0.2), n2 = majorant_norm(X, 0.25, 0.2);
  CHECK(n2.upper == doctest::Approx(n1.upper * 0.25).epsilon(1e-12));
  CHECK(n2.lower == doctest::Approx(n1.lower * 0.25).epsilon(1e-12));
  CHECK(n1.lower <= n1.upper + 1e-15);

  auto Y = random_field(ctx, rng, 20, 1, 4);
  auto base = majorant_norm(Y, 0.5, 0.2).upper;
  CHECK(majorant_norm(Y, 0.4, 0.2).upper <= base);
  CHECK(majorant_norm(Y, 0.5, 0.5).upper <= base);
}

TEST_CASE("truncation drops and flags high degrees") {
  auto ctx = TruncationContext::finite(2, 2);
  VectorField<GR> X(ctx);
  X.add_term(fk(1), MultiIndex::unit(fk(2), 4), GR(1));
  CHECK(X.is_zero());
  CHECK(X.truncated());
  VectorField<GR> A(ctx), B(ctx);
  A.add_term(fk(1), MultiIndex::unit(fk(2), 3), GR(1));
  B.add_term(fk(2), MultiIndex::unit(fk(1), 3), GR(1));
  auto C = bracket(A, B);
  CHECK(C.is_zero());
  CHECK(C.truncated());
}

TEST_CASE("float arithmetic matches exact arithmetic") {
  auto ctx = TruncationContext::finite(3, 5);
  std::mt19937_64 rng(53);
  for (int t = 0; t < 10; ++t) {
    auto X = random_field(ctx, rng, 6, 0, 2);
    auto Y = random_field(ctx, rng, 6, 0, 2);
    auto exact = to_float(bracket(X, Y));
    auto fl = bracket(to_float(X), to_float(Y));
    auto diff = exact - fl;
    for (const auto& [key, c] : diff.terms()) CHECK(std::abs(c) <= 1e-12);
  }
}

TEST_CASE("serialization round trip") {
  std::mt19937_64 rng(59);
  for (auto ctx : {TruncationContext::finite(6, 6), TruncationContext::lattice(3, 5, true)}) {
    for (int t = 0; t < 10; ++t) {
      auto X = random_field(ctx, rng, 20, 0, 4);
      auto text = serialize(X);
      auto Y = parse_vector_field<GR>(text, ctx);
      CHECK(Y == X);
      CHECK(serialize(Y) == text);
    }
    ScalarSeries<GR> f(ctx);
    auto modes = ctx.modes();
    for (int t = 0; t < 10;) {
      auto q = random_index(rng, modes, 2);
      if (momentum_or_zero(q, ctx) != 0) continue;
      f.add_term(q, random_gr(rng));
      ++t;
    }
    CHECK(parse_scalar_series<GR>(serialize(f), ctx) == f);
  }
  auto ctx = TruncationContext::finite(6, 6);
  CHECK(parse_vector_field<GR>("# comment\n\n1 | 2:2 | 1/2 -3\n", ctx).coefficient(fk(1), MultiIndex::unit(fk(2), 2)) ==
        GR(Rational(1, 2), Rational(-3)));
  CHECK_THROWS_WITH_AS(parse_vector_field<GR>("1 | 2:2 | 1 0\n7 | 1:1 | 1 0\n", ctx), doctest::Contains("line 2"),
                       InputError);
  CHECK_THROWS_AS(parse_vector_field<GR>("1 | 2:0 | 1 0\n", ctx), InputError);
  CHECK_THROWS_AS(parse_vector_field<GR>("1 | 2:1 2:1 | 1 0\n", ctx), InputError);
  CHECK_THROWS_AS(parse_vector_field<GR>("1 | 2:1 | 1\n", ctx), InputError);
  CHECK_THROWS_AS(parse_vector_field<GR>("1 | 2:1 | x 0\n", ctx), InputError);
}
