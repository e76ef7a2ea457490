#pragma once

// Test helpers: seeded random fields and a dense-exponent polynomial oracle
// that shares no code with the sparse field algebra.

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "rnf/errors.hpp"
#include "rnf/field.hpp"
#include "rnf/frequency.hpp"
#include "rnf/resonance.hpp"

namespace rnf::test {

using GR = GaussianRational;

inline GR random_gr(std::mt19937_64& rng, int mag = 3, int den = 4) {
  std::uniform_int_distribution<int> n(-mag, mag), d(1, den);
  GR c(Rational(n(rng), d(rng)), Rational(n(rng), d(rng)));
  if (c.is_zero()) c = GR(1);
  return c;
}

inline MultiIndex random_index(std::mt19937_64& rng, const std::vector<ModeKey>& modes, int degree) {
  std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
  MultiIndex q;
  for (int i = 0; i < degree; ++i) q.add(modes[pick(rng)], 1);
  return q;
}

/// Random field with `terms` monomials of scaling degree in [lo, hi] that satisfy keep(q, k)
/// and, when enabled, momentum conservation.
template <class Keep>
VectorField<GR> random_field(const TruncationContext& ctx, std::mt19937_64& rng, int terms, int lo, int hi,
                             Keep&& keep) {
  VectorField<GR> X(ctx);
  auto modes = ctx.modes();
  std::uniform_int_distribution<int> deg(lo, hi);
  std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
  int made = 0;
  for (int attempt = 0; made < terms && attempt < terms * 2000; ++attempt) {
    MultiIndex q = random_index(rng, modes, deg(rng) + 1);
    ModeKey k = modes[pick(rng)];
    if (ctx.momentum_enabled && momentum(q, ctx) != ctx.momentum(k)) continue;
    if (!keep(q, k)) continue;
    X.add_term(k, q, random_gr(rng));
    ++made;
  }
  return X;
}

inline VectorField<GR> random_field(const TruncationContext& ctx, std::mt19937_64& rng, int terms, int lo,
                                    int hi) {
  return random_field(ctx, rng, terms, lo, hi, [](const MultiIndex&, ModeKey) { return true; });
}

// Dense oracle: exponents are plain vectors indexed by the position in ctx.modes().
using Exps = std::vector<int>;
using Poly = std::map<Exps, GR>;
struct Dense {
  std::size_t n = 0;
  std::vector<Poly> comp;
};

inline void accumulate(Poly& p, const Exps& e, const GR& c) {
  auto& v = p[e];
  v += c;
  if (v.is_zero()) p.erase(e);
}

inline Dense to_dense(const VectorField<GR>& X) {
  const auto& ctx = X.context();
  Dense d;
  d.n = ctx.dimension();
  d.comp.resize(d.n);
  for (const auto& [key, c] : X.terms()) {
    Exps e(d.n, 0);
    for (const auto& [m, x] : key.q.entries()) e[static_cast<std::size_t>(ctx.index_of(m))] = x;
    accumulate(d.comp[static_cast<std::size_t>(ctx.index_of(key.k))], e, c);
  }
  return d;
}

inline Poly derivative(const Poly& p, std::size_t i) {
  Poly out;
  for (const auto& [e, c] : p) {
    if (e[i] == 0) continue;
    Exps f = e;
    f[i] -= 1;
    accumulate(out, f, c * GR(static_cast<long>(e[i])));
  }
  return out;
}

inline Poly product(const Poly& a, const Poly& b, int max_total) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      Exps e(ea.size());
      int total = 0;
      for (std::size_t i = 0; i < e.size(); ++i) total += e[i] = ea[i] + eb[i];
      if (total <= max_total) accumulate(out, e, ca * cb);
    }
  return out;
}

/// [X, Y]^j = sum_i X^i d_i Y^j - Y^i d_i X^j, keeping polynomial degree <= D + 1.
inline Dense dense_bracket(const Dense& X, const Dense& Y, int D) {
  Dense out;
  out.n = X.n;
  out.comp.resize(X.n);
  for (std::size_t j = 0; j < X.n; ++j)
    for (std::size_t i = 0; i < X.n; ++i) {
      for (const auto& [e, c] : product(X.comp[i], derivative(Y.comp[j], i), D + 1)) accumulate(out.comp[j], e, c);
      for (const auto& [e, c] : product(Y.comp[i], derivative(X.comp[j], i), D + 1))
        accumulate(out.comp[j], e, -c);
    }
  return out;
}

inline bool operator==(const Dense& a, const Dense& b) { return a.n == b.n && a.comp == b.comp; }

/// exp(ad_F) W computed densely: sum_k ad_F^k W / k! until the series vanishes.
inline Dense dense_lie_series(const Dense& F, const Dense& W, int D) {
  Dense out = W, term = W;
  for (long k = 1; k <= 64; ++k) {
    term = dense_bracket(F, term, D);
    bool zero = true;
    for (auto& p : term.comp) {
      for (auto& [e, c] : p) c *= GR(Rational(1, k));
      if (!p.empty()) zero = false;
    }
    if (zero) break;
    for (std::size_t j = 0; j < out.n; ++j)
      for (const auto& [e, c] : term.comp[j]) accumulate(out.comp[j], e, c);
  }
  return out;
}

/// Field with lambda = (2, 1, z1, -z1, z2, -z2) and no perturbation.
inline FrequencyModel dim6_model(double z1 = 1.4142135623730951, double z2 = 1.7320508075688772) {
  FrequencyModel m;
  m.add_symbol("1", Rational(1), 1.0);
  m.add_symbol("zeta1", z1);
  m.add_symbol("zeta2", z2);
  const long c[6][2] = {{0, 2}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {2, -1}};
  for (int i = 0; i < 6; ++i)
    m.set_lambda(ModeKey::finite(i + 1), SymbolicValue::basis(3, static_cast<std::size_t>(c[i][0]), GR(c[i][1])));
  return m;
}

inline ModeKey fk(int i) { return ModeKey::finite(i); }

// Classification by explicit divisibility with the known generators e3+e4, e5+e6.
inline int ideal_of(const MultiIndex& q) {
  int a = std::min(q[fk(3)], q[fk(4)]), b = std::min(q[fk(5)], q[fk(6)]);
  return std::min(a + b, 2);
}

inline Dense dense_part(const Dense& X, const std::function<bool(const Exps&, std::size_t)>& keep) {
  Dense out;
  out.n = X.n;
  out.comp.resize(X.n);
  for (std::size_t k = 0; k < X.n; ++k)
    for (const auto& [e, c] : X.comp[k])
      if (keep(e, k)) out.comp[k][e] = c;
  return out;
}

inline MultiIndex to_index(const Exps& e) {
  MultiIndex q;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i]) q.add(fk(static_cast<int>(i) + 1), e[i]);
  return q;
}

inline int total(const Exps& e) {
  int t = 0;
  for (int v : e) t += v;
  return t;
}

// Degree-by-degree elimination of the I0 + I1 part above M* by single Lie transforms.
inline Dense elimination_oracle(const VectorField<GR>& W, const FrequencyModel& model, int mstar, int D) {
  Dense cur = to_dense(W);
  for (int d = mstar; d <= D; ++d) {
    Dense F;
    F.n = cur.n;
    F.comp.resize(cur.n);
    for (std::size_t k = 0; k < cur.n; ++k)
      for (const auto& [e, c] : cur.comp[k]) {
        if (total(e) - 1 != d) continue;
        auto q = to_index(e);
        if (ideal_of(q) == 2) continue;
        auto div = model.exact(model.divisor(q, fk(static_cast<int>(k) + 1)));
        if (div.is_zero()) throw std::logic_error("elimination oracle hit a resonant term");
        F.comp[k][e] = c / div;
      }
    cur = dense_lie_series(F, cur, D);
  }
  return cur;
}

}  // namespace rnf::test
