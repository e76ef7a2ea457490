#include <random>

#include "doctest.h"
#include "rnf/normalform.hpp"
#include "rnf/textio.hpp"
#include "rnf/verify.hpp"
#include "support.hpp"

using namespace rnf;
using namespace rnf::test;

namespace {

struct Dim6 {
  TruncationContext ctx;
  FrequencyModel model;
  ResonanceModule module;
};

Dim6 dim6(int D) {
  Dim6 s{TruncationContext::finite(6, D), dim6_model(), {}};
  s.module = enumerate_resonance(s.ctx, s.model);
  return s;
}

VectorField<GR> random_Z(const TruncationContext& ctx, std::mt19937_64& rng) {
  VectorField<GR> Z(ctx);
  std::bernoulli_distribution pick(0.4);
  for (int pair : {3, 5})
    for (int k = 1; k <= 6; ++k)
      if (pick(rng)) {
        MultiIndex q{{fk(pair), 1}, {fk(pair + 1), 1}};
        q.add(fk(k), 1);
        Z.add_term(fk(k), q, random_gr(rng));
      }
  if (Z.is_zero()) Z.add_term(fk(3), MultiIndex{{fk(3), 2}, {fk(4), 1}}, GR(1));
  return Z;
}

}  // namespace

TEST_CASE("linear homological equation") {
  auto s = dim6(6);
  auto D = linear_field<GR>(s.model, s.ctx);
  std::mt19937_64 rng(71);
  auto nonres = [&](const MultiIndex& q, ModeKey k) { return !is_resonant(s.model, s.ctx, q, k); };
  for (int t = 0; t < 100; ++t) {
    auto Y = random_field(s.ctx, rng, 12, 1, 6, nonres);
    auto F = solve_linear_homological(Y, s.model);
    REQUIRE(bracket(D, F) == Y);
  }
  VectorField<GR> R(s.ctx);
  R.add_term(fk(1), MultiIndex::unit(fk(2), 2), GR(1));
  CHECK_THROWS_AS(solve_linear_homological(R, s.model), ResonantTermInRange);
}

TEST_CASE("the homological correction is nilpotent") {
  auto s = dim6(8);
  const int M = s.module.M_star_minimal;
  std::mt19937_64 rng(73);
  int nontrivial = 0;
  for (int t = 0; t < 100; ++t) {
    const int i = t % 2;
    auto Z = random_Z(s.ctx, rng);
    auto U = random_field(s.ctx, rng, 10, M, 8, [&](const MultiIndex& q, ModeKey) { return ideal_of(q) == i; });
    auto B = [&](const VectorField<GR>& V) {
      auto parts = split_ideals(bracket(Z, V), s.module);
      return i == 0 ? parts.X0 : parts.X1;
    };
    auto once = solve_linear_homological(B(U), s.model);
    if (!once.is_zero()) ++nontrivial;
    auto twice = solve_linear_homological(B(once), s.model);
    REQUIRE(twice.is_zero());
  }
  CHECK(nontrivial > 0);
}

TEST_CASE("extended homological equation") {
  auto s = dim6(8);
  const int M = s.module.M_star_minimal;
  std::mt19937_64 rng(79);
  for (int t = 0; t < 20; ++t) {
    auto Z = random_Z(s.ctx, rng);
    auto N = random_field(s.ctx, rng, 4, M, 8, [](const MultiIndex& q, ModeKey) { return ideal_of(q) == 2; });
    auto X0 = random_field(s.ctx, rng, 6, M, 8, [](const MultiIndex& q, ModeKey) { return ideal_of(q) == 0; });
    auto X1 = random_field(s.ctx, rng, 6, M, 8, [](const MultiIndex& q, ModeKey) { return ideal_of(q) == 1; });
    auto D = linear_field<GR>(s.model, s.ctx);
    auto F0 = solve_extended_homological(X0, 0, Z, N, static_cast<const VectorField<GR>*>(nullptr), s.model, s.module);
    auto F1 = solve_extended_homological(X1, 1, Z, N, &F0, s.model, s.module);
    CHECK(split_ideals(F0, s.module).X0 == F0);
    CHECK(split_ideals(F1, s.module).X1 == F1);
    // Pi0 [D + Z + N, F0] = X0 and Pi1 ([D + Z + N, F1] + [Z + N, F0]) = X1.
    auto L = D + Z + N;
    CHECK(split_ideals(bracket(L, F0), s.module).X0 == X0);
    CHECK(split_ideals(bracket(L, F1) + bracket(Z + N, F0), s.module).X1 == X1);
  }
}

TEST_CASE("lie series against the dense oracle") {
  auto ctx = TruncationContext::finite(3, 7);
  std::mt19937_64 rng(83);
  for (int t = 0; t < 20; ++t) {
    auto F = random_field(ctx, rng, 4, 1, 3);
    auto W = random_field(ctx, rng, 6, 0, 3);
    CHECK(to_dense(pushforward_exp(F, W)) == dense_lie_series(to_dense(F), to_dense(W), 7));
  }
  auto lin = random_field(ctx, rng, 2, 0, 0);
  auto W = random_field(ctx, rng, 2, 1, 2);
  CHECK_THROWS_AS(pushforward_exp(lin, W), NonterminatingSeries);
}

TEST_CASE("decompose") {
  auto s = dim6(8);
  auto D = linear_field<GR>(s.model, s.ctx);
  auto ex = build_example_dim6<GR>(1.4142135623730951, 1.7320508075688772, 5, 8);
  auto d = decompose(ex.W, ex.model, s.module);
  CHECK(d.assemble() == ex.W);
  CHECK(d.linear == D);
  CHECK(d.m_star == 4);
  for (const auto& [key, c] : d.Z.terms()) {
    CHECK(key.q[key.k] >= 1);
    CHECK(scaling_degree(key) < 4);
  }
  CHECK(split_ideals(d.N, s.module).X2 == d.N);
  CHECK(split_ideals(d.X, s.module).X2.is_zero());

  auto planted = D;
  planted.add_term(fk(1), MultiIndex::unit(fk(2), 2), GR(1));
  CHECK_THROWS_WITH_AS(decompose(planted, s.model, s.module), doctest::Contains("non-diagonal"), HypothesisViolation);
  try {
    decompose(planted, s.model, s.module);
  } catch (const HypothesisViolation& e) {
    CHECK(e.term() == "1 | 2:2 | 1 0");
  }

  // x2^2 x3 x4 d1 is resonant, non-diagonal and of order 3 < M*.
  auto mixed = D;
  mixed.add_term(fk(3), MultiIndex{{fk(3), 2}, {fk(4), 1}}, GR(1));
  mixed.add_term(fk(1), MultiIndex{{fk(2), 2}, {fk(3), 1}, {fk(4), 1}}, GR(1));
  try {
    decompose(mixed, s.model, s.module);
    FAIL("expected HypothesisViolation");
  } catch (const HypothesisViolation& e) {
    CHECK(e.term() == "1 | 2:2 3:1 4:1 | 1 0");
  }

  auto nonres = D;
  nonres.add_term(fk(1), MultiIndex{{fk(1), 1}, {fk(2), 1}}, GR(1));
  CHECK_THROWS_AS(decompose(nonres, s.model, s.module), HypothesisViolation);

  auto offdiag = D;
  offdiag.add_term(fk(1), MultiIndex::unit(fk(2)), GR(1));
  CHECK_THROWS_AS(decompose(offdiag, s.model, s.module), HypothesisViolation);

  auto wrong = D;
  wrong.add_term(fk(3), MultiIndex::unit(fk(3)), GR(1));
  CHECK_THROWS_AS(decompose(wrong, s.model, s.module), HypothesisViolation);

  VectorField<GR> missing(s.ctx);
  CHECK_THROWS_AS(decompose(missing, s.model, s.module), HypothesisViolation);
}

TEST_CASE("prenormalization removes low-degree non-resonant terms") {
  auto s = dim6(6);
  std::mt19937_64 rng(89);
  for (int t = 0; t < 10; ++t) {
    auto W = linear_field<GR>(s.model, s.ctx) + random_field(s.ctx, rng, 10, 1, 5);
    W -= project_set(W, [&](const MultiIndex& q, ModeKey k) {
      return q.total() - 1 < 4 && q.total() > 1 && is_resonant(s.model, s.ctx, q, k) && q[k] == 0;
    });
    auto [P, log] = prenormalize(W, s.model, s.module, 4);
    for (const auto& [key, c] : P.terms())
      if (scaling_degree(key) >= 1 && scaling_degree(key) < 4) CHECK(is_resonant(s.model, s.ctx, key.q, key.k));
    Dense cur = to_dense(W);
    for (std::size_t g = 0; g < log.size(); ++g) cur = dense_lie_series(to_dense(log.F[g]), cur, 6);
    CHECK(cur == to_dense(P));
    CHECK(project_degree_range(P, 0, 0) == linear_field<GR>(s.model, s.ctx));
  }
}

TEST_CASE("kam normalization of seeded six-variable fields") {
  auto s = dim6(8);
  CHECK(kam_step_limit(8, 4) == 3);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    auto ex = build_example_dim6<GR>(1.4142135623730951, 1.7320508075688772, seed, 8);
    auto res = normalize(ex.W, ex.model, s.module);
    CHECK(res.trace.steps.size() <= 3);
    CHECK(res.field.X.is_zero());
    for (const auto& st : res.trace.steps) CHECK(st.doubled);
    auto nf = res.field.assemble();
    auto parts = split_ideals(project_degree_range(nf, 4, 8), s.module);
    CHECK(parts.X0.is_zero());
    CHECK(parts.X1.is_zero());
    CHECK(check_tangent_sigma(nf, ex.model, s.module).tangent);

    auto oracle = elimination_oracle(ex.W, ex.model, 4, 8);
    auto mine = to_dense(nf);
    auto high01 = [](const Exps& e, std::size_t) { return total(e) - 1 >= 4 && ideal_of(to_index(e)) < 2; };
    auto j0 = [](const Exps& e, std::size_t) { return ideal_of(to_index(e)) == 0; };
    auto low = [](const Exps& e, std::size_t) { return total(e) - 1 < 4; };
    CHECK(dense_part(oracle, high01) == dense_part(mine, high01));
    CHECK(dense_part(oracle, j0) == dense_part(mine, j0));
    CHECK(dense_part(oracle, low) == dense_part(mine, low));

    // The generator log reproduces the normal form.
    Dense cur = to_dense(ex.W);
    for (std::size_t g = 0; g < res.log.size(); ++g) cur = dense_lie_series(to_dense(res.log.F[g]), cur, 8);
    CHECK(cur == mine);
  }
}

TEST_CASE("normalization is idempotent") {
  auto s = dim6(8);
  auto ex = build_example_dim6<GR>(1.4142135623730951, 1.7320508075688772, 3, 8);
  auto first = normalize(ex.W, ex.model, s.module);
  auto again = normalize(first.field.assemble(), ex.model, s.module);
  CHECK(again.trace.steps.empty());
  CHECK(again.log.empty());
  CHECK(again.field.assemble() == first.field.assemble());
  CHECK_THROWS_AS(kam_step(first.field, ex.model, s.module), AlreadyNormal);
}

TEST_CASE("float normalization tracks the exact one") {
  auto s = dim6(8);
  // Both builds use the exact stand-ins so that only rounding separates them.
  const double z1 = rational_approximation(1.4142135623730951, 10000).get_d();
  const double z2 = rational_approximation(1.7320508075688772, 10000).get_d();
  auto ex = build_example_dim6<GR>(z1, z2, 7, 8);
  auto exf = build_example_dim6<Complex>(z1, z2, 7, 8);
  auto a = normalize(ex.W, ex.model, s.module);
  auto b = normalize(exf.W, exf.model, s.module);
  CHECK(a.trace.steps.size() == b.trace.steps.size());
  auto diff = to_float(a.field.assemble()) - b.field.assemble();
  const auto ref = to_float(a.field.assemble());
  for (const auto& [key, c] : diff.terms())
    CHECK(std::abs(c) <= 1e-9 * std::max(1.0, std::abs(ref.coefficient(key.k, key.q))));
}

TEST_CASE("trace diagnostics") {
  auto s = dim6(8);
  auto ex = build_example_dim6<GR>(1.4142135623730951, 1.7320508075688772, 2, 8);
  auto res = normalize(ex.W, ex.model, s.module);
  REQUIRE_FALSE(res.trace.steps.empty());
  const auto& st = res.trace.steps.front();
  CHECK(st.r == doctest::Approx(1.0));
  CHECK(st.rho == doctest::Approx(0.05));
  CHECK(st.sigma == doctest::Approx(0.125));
  CHECK(st.norm_X > 0);
  CHECK(st.eps == doctest::Approx(st.norm_X));
  CHECK(res.trace.initial_gianna == doctest::Approx(st.eps * std::pow(1 + st.Theta, 7)));
  for (std::size_t i = 1; i < res.trace.steps.size(); ++i) {
    const auto& a = res.trace.steps[i - 1];
    const auto& b = res.trace.steps[i];
    CHECK(b.r == doctest::Approx(a.r - 5 * a.rho));
    CHECK(b.s == doctest::Approx(a.s + 2 * a.sigma));
  }
}
