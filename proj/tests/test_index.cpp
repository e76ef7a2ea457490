#include <cmath>
#include <random>

#include "doctest.h"
#include "rnf/errors.hpp"
#include "rnf/index.hpp"

using namespace rnf;

namespace {

ModeKey L(int j, int s) { return ModeKey{j, s}; }

// Random (q, k) with momentum(q) = m_k on the lattice |j| <= 12.
std::pair<MultiIndex, ModeKey> momentum_pair(std::mt19937_64& rng) {
  const int N = 12;
  std::uniform_int_distribution<int> jd(-N, N), sd(0, 1), deg(1, 7);
  while (true) {
    MultiIndex q;
    int m = 0;
    for (int d = deg(rng); d > 0; --d) {
      ModeKey h{jd(rng), sd(rng) ? 1 : -1};
      q.add(h, 1);
      m += h.sigma * h.j;
    }
    int s = sd(rng) ? 1 : -1;
    int j = s * m;
    if (std::abs(j) <= N) return {q, ModeKey{j, s}};
  }
}

}  // namespace

TEST_CASE("mode weights and ordering") {
  CHECK(L(0, 1).weight() == 1);
  CHECK(L(-1, -1).weight() == 1);
  CHECK(L(-7, 1).weight() == 7);
  CHECK(L(1, 1) < L(-2, 1));
  CHECK(L(-2, 1) < L(2, -1));
  CHECK(L(2, -1) < L(2, 1));
}

TEST_CASE("multi-index degree") {
  CHECK(degree(MultiIndex{}) == 0);
  CHECK(degree(MultiIndex{{ModeKey::finite(3), 1}, {ModeKey::finite(4), 1}}) == 2);
  CHECK(degree(MultiIndex{{ModeKey::finite(1), 2}, {ModeKey::finite(2), 3}}) == 5);
}

TEST_CASE("nonnegative multi-index rejects negative entries") {
  MultiIndex q;
  CHECK_THROWS_AS(q.add(ModeKey::finite(1), -1), std::invalid_argument);
  SignedIndex p;
  p.add(ModeKey::finite(1), -1);
  CHECK(p.l1() == 1);
  CHECK(p.total() == -1);
  CHECK_THROWS_AS(to_nonnegative(p), std::invalid_argument);
}

TEST_CASE("momentum") {
  auto ctx = TruncationContext::lattice(5, 4, true);
  CHECK(momentum(MultiIndex{{L(1, 1), 1}, {L(-1, 1), 1}}, ctx) == 0);
  CHECK(momentum(MultiIndex{{L(2, 1), 1}, {L(1, -1), 1}}, ctx) == 1);
  for (int j = -5; j <= 5; ++j) CHECK(momentum(MultiIndex{{L(j, 1), 1}, {L(j, -1), 1}}, ctx) == 0);
  SignedIndex p{{L(3, 1), 1}, {L(2, -1), -2}};
  CHECK(momentum(p, ctx) == 3 + 4);

  auto fin = TruncationContext::finite(4, 3);
  CHECK_THROWS_AS(momentum(MultiIndex{{ModeKey::finite(1), 1}}, fin), std::logic_error);
  CHECK(momentum_or_zero(MultiIndex{{ModeKey::finite(1), 1}}, fin) == 0);
}

TEST_CASE("degree and momentum are additive") {
  auto ctx = TruncationContext::lattice(12, 8, true);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    auto [a, ka] = momentum_pair(rng);
    auto [b, kb] = momentum_pair(rng);
    CHECK(degree(a + b) == degree(a) + degree(b));
    CHECK(momentum(a + b, ctx) == momentum(a, ctx) + momentum(b, ctx));
  }
}

TEST_CASE("truncation context validation") {
  CHECK_THROWS(TruncationContext::finite(3, 0).validate());
  CHECK_THROWS(TruncationContext::lattice(2, 3, true, 1.0).validate());
  CHECK_NOTHROW(TruncationContext::lattice(0, 1, true).validate());
  auto ctx = TruncationContext::lattice(1, 2, true);
  auto modes = ctx.modes();
  REQUIRE(modes.size() == 6);
  CHECK(modes[0] == L(0, -1));
  CHECK(modes[1] == L(0, 1));
  CHECK(modes[2] == L(-1, -1));
  CHECK(modes[5] == L(1, 1));
  CHECK(ctx.index_of(L(2, 1)) == -1);
  CHECK(ctx.momentum(L(-1, -1)) == 1);
}

TEST_CASE("nhat rearrangement") {
  CHECK(nhat(MultiIndex{{L(3, 1), 1}, {L(-2, -1), 1}, {L(1, 1), 1}}) == std::vector<int>{3, 2, 1});
  CHECK(nhat(MultiIndex{{L(0, 1), 2}}) == std::vector<int>{1, 1});
  CHECK(nhat(MultiIndex{{L(5, 1), 1}, {L(2, -1), 3}}) == std::vector<int>{5, 2, 2, 2});
  CHECK_THROWS(nhat(MultiIndex{{L(5, 1), 1}}));
}

TEST_CASE("weight_c examples") {
  for (ModeKey k : {L(0, 1), L(3, -1), L(-7, 1)}) {
    CHECK(weight_c(MultiIndex::unit(k), k, 0.3, 2.0) == doctest::Approx(1.0));
    CHECK(weight_c(MultiIndex::unit(k, 2), k, 1.0, 0.0) == doctest::Approx(1.0 / (k.weight() * k.weight())));
  }
  CHECK_THROWS(weight_c(MultiIndex{}, L(1, 1), 1.0, 0.0));
  double w = weight_c(MultiIndex{{L(2, 1), 1}, {L(3, -1), 1}}, L(1, 1), 0.5, 0.7);
  double expect = 0.5 * std::pow(1.0 / 6.0, 2) * std::exp(-0.7 * (std::sqrt(2.0) + std::sqrt(3.0) - 1.0));
  CHECK(w == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("rearrangement inequalities on momentum-conserving pairs") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 10000; ++i) {
    auto [q, k] = momentum_pair(rng);
    auto v = q;
    v.add(k, 1);
    auto n = nhat(v);
    long rest = 0;
    for (std::size_t l = 1; l < n.size(); ++l) rest += n[l];
    REQUIRE(n.front() <= rest);

    for (double theta : {0.25, 0.5, 0.75}) {
      double lhs = std::pow(k.weight(), theta);
      for (const auto& [h, e] : q.entries()) lhs += e * std::pow(h.weight(), theta);
      double rhs = 2 * std::pow(n[0], theta);
      for (std::size_t l = 2; l < n.size(); ++l) rhs += (2 - std::pow(2.0, theta)) * std::pow(n[l], theta);
      REQUIRE(lhs >= rhs - 1e-12);
      REQUIRE(weight_exponent(q, k, theta) >= -1e-12);
      double ratio = weight_c(q, k, 0.8, 1.5, theta) / weight_c(q, k, 0.8, 1.0, theta);
      REQUIRE(ratio <= 1.0 + 1e-12);
    }
  }
}
