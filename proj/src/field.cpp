#include "rnf/field.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <random>
#include <stdexcept>

#include "rnf/errors.hpp"

namespace rnf {

namespace {

void check_support(const MultiIndex& q, const TruncationContext& ctx) {
  for (const auto& [h, n] : q.entries())
    if (!ctx.contains(h)) throw std::invalid_argument("exponent outside the mode cutoff");
}

template <class S>
void accumulate(std::map<TermKey, S>& m, TermKey&& key, const S& c, double tol) {
  auto [it, inserted] = m.try_emplace(std::move(key), c);
  if (!inserted) {
    it->second += c;
    if (ScalarTraits<S>::is_zero(it->second, tol)) m.erase(it);
  } else if (ScalarTraits<S>::is_zero(c, tol)) {
    m.erase(it);
  }
}

template <class S>
void accumulate(std::map<MultiIndex, S>& m, MultiIndex&& key, const S& c, double tol) {
  auto [it, inserted] = m.try_emplace(std::move(key), c);
  if (!inserted) {
    it->second += c;
    if (ScalarTraits<S>::is_zero(it->second, tol)) m.erase(it);
  } else if (ScalarTraits<S>::is_zero(c, tol)) {
    m.erase(it);
  }
}

void require_same(const TruncationContext& a, const TruncationContext& b) {
  if (!(a == b)) throw ContextMismatch("operands live in different truncation contexts");
}

// a + b - e_k, with b_k >= 1 or a_k >= 1 guaranteed by the caller.
MultiIndex shifted_sum(const MultiIndex& a, const MultiIndex& b, ModeKey k) {
  MultiIndex r = a + b;
  r.add(k, -1);
  return r;
}

}  // namespace

// ScalarSeries

template <class S>
void ScalarSeries<S>::add_term(const MultiIndex& q, const S& c) {
  check_support(q, ctx_);
  if (ctx_.momentum_enabled && momentum(q, ctx_) != 0)
    throw std::invalid_argument("scalar series term violates momentum invariance");
  if (q.total() > ctx_.degree_cutoff) {
    truncated_ = true;
    return;
  }
  accumulate(terms_, MultiIndex(q), c, ctx_.float_tolerance);
}

template <class S>
S ScalarSeries<S>::coefficient(const MultiIndex& q) const {
  auto it = terms_.find(q);
  return it == terms_.end() ? S{} : it->second;
}

template <class S>
ScalarSeries<S>& ScalarSeries<S>::operator+=(const ScalarSeries& o) {
  require_same(ctx_, o.ctx_);
  for (const auto& [q, c] : o.terms_) accumulate(terms_, MultiIndex(q), c, ctx_.float_tolerance);
  truncated_ = truncated_ || o.truncated_;
  return *this;
}

template <class S>
ScalarSeries<S>& ScalarSeries<S>::operator-=(const ScalarSeries& o) {
  require_same(ctx_, o.ctx_);
  for (const auto& [q, c] : o.terms_) accumulate(terms_, MultiIndex(q), S{} - c, ctx_.float_tolerance);
  truncated_ = truncated_ || o.truncated_;
  return *this;
}

template <class S>
ScalarSeries<S>& ScalarSeries<S>::operator*=(const S& c) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    if (ScalarTraits<S>::is_zero(it->second, ctx_.float_tolerance))
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

// VectorField

template <class S>
void VectorField<S>::add_term(ModeKey k, const MultiIndex& q, const S& c) {
  if (!ctx_.contains(k)) throw std::invalid_argument("direction outside the mode cutoff");
  if (q.total() < 1) throw std::invalid_argument("vector field terms need ||q|| >= 1");
  check_support(q, ctx_);
  if (ctx_.momentum_enabled && momentum(q, ctx_) != ctx_.momentum(k))
    throw std::invalid_argument("vector field term is not momentum preserving");
  if (q.total() - 1 > ctx_.degree_cutoff) {
    truncated_ = true;
    return;
  }
  accumulate(terms_, TermKey{k, q}, c, ctx_.float_tolerance);
}

template <class S>
void VectorField<S>::insert_unchecked(const TermKey& key, const S& c) {
  accumulate(terms_, TermKey(key), c, ctx_.float_tolerance);
}

template <class S>
S VectorField<S>::coefficient(ModeKey k, const MultiIndex& q) const {
  auto it = terms_.find(TermKey{k, q});
  return it == terms_.end() ? S{} : it->second;
}

template <class S>
int VectorField<S>::order() const {
  if (terms_.empty()) return -1;
  int o = INT_MAX;
  for (const auto& [key, c] : terms_) o = std::min(o, scaling_degree(key));
  return o;
}

template <class S>
int VectorField<S>::max_degree() const {
  int o = -1;
  for (const auto& [key, c] : terms_) o = std::max(o, scaling_degree(key));
  return o;
}

template <class S>
VectorField<S>& VectorField<S>::operator+=(const VectorField& o) {
  require_same(ctx_, o.ctx_);
  for (const auto& [key, c] : o.terms_) insert_unchecked(key, c);
  truncated_ = truncated_ || o.truncated_;
  return *this;
}

template <class S>
VectorField<S>& VectorField<S>::operator-=(const VectorField& o) {
  require_same(ctx_, o.ctx_);
  for (const auto& [key, c] : o.terms_) insert_unchecked(key, S{} - c);
  truncated_ = truncated_ || o.truncated_;
  return *this;
}

template <class S>
VectorField<S>& VectorField<S>::operator*=(const S& c) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    if (ScalarTraits<S>::is_zero(it->second, ctx_.float_tolerance))
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

template <class S>
VectorField<S> VectorField<S>::operator-() const {
  VectorField r = *this;
  for (auto& [key, c] : r.terms_) c = S{} - c;
  return r;
}

// Lie algebra

template <class S>
ScalarSeries<S> lie_derivative(const VectorField<S>& X, const ScalarSeries<S>& f) {
  require_same(X.context(), f.context());
  const auto& ctx = f.context();
  ScalarSeries<S> out(ctx);
  bool cut = false;
  std::map<MultiIndex, S> acc;
  for (const auto& [key, c] : X.terms()) {
    for (const auto& [b, d] : f.terms()) {
      int bk = b[key.k];
      if (bk == 0) continue;
      if (key.q.total() + b.total() - 1 > ctx.degree_cutoff) {
        cut = true;
        continue;
      }
      S v = c * d;
      v *= S(static_cast<long>(bk));
      accumulate(acc, shifted_sum(key.q, b, key.k), v, ctx.float_tolerance);
    }
  }
  for (const auto& [q, c] : acc) out.add_term(q, c);
  if (cut) out.mark_truncated();
  return out;
}

template <class S>
ScalarSeries<S> multiply(const ScalarSeries<S>& f, const ScalarSeries<S>& g) {
  require_same(f.context(), g.context());
  const auto& ctx = f.context();
  ScalarSeries<S> out(ctx);
  std::map<MultiIndex, S> acc;
  bool cut = false;
  for (const auto& [a, c] : f.terms())
    for (const auto& [b, d] : g.terms()) {
      if (a.total() + b.total() > ctx.degree_cutoff) {
        cut = true;
        continue;
      }
      accumulate(acc, a + b, c * d, ctx.float_tolerance);
    }
  for (const auto& [q, c] : acc) out.add_term(q, c);
  if (cut) out.mark_truncated();
  return out;
}

template <class S>
VectorField<S> bracket(const VectorField<S>& X, const VectorField<S>& Y) {
  require_same(X.context(), Y.context());
  const auto& ctx = X.context();
  const int D = ctx.degree_cutoff;
  const double tol = ctx.float_tolerance;
  VectorField<S> out(ctx);
  for (const auto& [kx, cx] : X.terms()) {
    const int dx = scaling_degree(kx);
    for (const auto& [ky, cy] : Y.terms()) {
      // X[Y^j] d_j - Y[X^k] d_k for the pair of monomials.
      int b = ky.q[kx.k];
      int a = kx.q[ky.k];
      if (b == 0 && a == 0) continue;
      if (dx + scaling_degree(ky) > D) {
        out.truncated_ = true;
        continue;
      }
      S prod = cx * cy;
      if (b != 0) {
        S v = prod;
        v *= S(static_cast<long>(b));
        accumulate(out.terms_, TermKey{ky.k, shifted_sum(kx.q, ky.q, kx.k)}, v, tol);
      }
      if (a != 0) {
        S v = prod;
        v *= S(static_cast<long>(-a));
        accumulate(out.terms_, TermKey{kx.k, shifted_sum(kx.q, ky.q, ky.k)}, v, tol);
      }
    }
  }
  return out;
}

template <class S>
VectorField<S> project_degree(const VectorField<S>& X, int d) {
  return project_degree_range(X, d, d);
}

template <class S>
VectorField<S> project_degree_range(const VectorField<S>& X, int lo, int hi) {
  return project_set(X, [lo, hi](const MultiIndex& q, ModeKey) {
    int d = q.total() - 1;
    return d >= lo && d <= hi;
  });
}

template <class S>
std::pair<VectorField<S>, VectorField<S>> split_diagonal(const VectorField<S>& X) {
  VectorField<S> diag(X.context()), out(X.context());
  for (const auto& [key, c] : X.terms()) {
    if (key.q[key.k] >= 1)
      diag.add_term(key.k, key.q, c);
    else
      out.add_term(key.k, key.q, c);
  }
  return {std::move(diag), std::move(out)};
}

template <class S>
NormReport majorant_norm(const VectorField<S>& X, double r, double s, int samples,
                         std::uint64_t seed) {
  if (!(r > 0.0) || !(s >= 0.0)) throw std::invalid_argument("majorant norm needs r > 0, s >= 0");
  const auto& ctx = X.context();
  const auto modes = ctx.modes();
  const std::size_t n = modes.size();

  struct Weighted {
    int k;
    std::vector<std::pair<int, int>> pw;
    double a;
  };
  std::vector<Weighted> w;
  std::vector<double> per_k(n, 0.0);
  for (const auto& [key, c] : X.terms()) {
    double a = ScalarTraits<S>::abs(c) * weight_c(key.q, key.k, r, s, ctx.theta);
    int k = ctx.index_of(key.k);
    per_k[static_cast<std::size_t>(k)] += a;
    Weighted t{k, {}, a};
    for (const auto& [h, e] : key.q.entries()) t.pw.emplace_back(ctx.index_of(h), e);
    w.push_back(std::move(t));
  }
  NormReport rep;
  rep.r = r;
  rep.s = s;
  double up = 0.0;
  for (double v : per_k) up += v * v;
  rep.upper = std::sqrt(up);

  auto value_at = [&](const std::vector<double>& y) {
    std::vector<double> out(n, 0.0);
    for (const auto& t : w) {
      double m = t.a;
      for (const auto& [i, e] : t.pw) m *= std::pow(y[static_cast<std::size_t>(i)], e);
      out[static_cast<std::size_t>(t.k)] += m;
    }
    double s2 = 0.0;
    for (double v : out) s2 += v * v;
    return std::sqrt(s2);
  };

  double lower = 0.0;
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(y.begin(), y.end(), 0.0);
    y[i] = 1.0;
    lower = std::max(lower, value_at(y));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int sidx = 0; sidx < samples; ++sidx) {
    double nn = 0.0;
    for (auto& v : y) {
      v = std::abs(gauss(rng));
      nn += v * v;
    }
    nn = std::sqrt(nn);
    if (nn == 0.0) continue;
    for (auto& v : y) v /= nn;
    lower = std::max(lower, value_at(y));
  }
  rep.lower = std::min(lower, rep.upper);
  return rep;
}

template <class S>
std::vector<Complex> evaluate(const VectorField<S>& X, const std::vector<Complex>& x) {
  const auto& ctx = X.context();
  if (x.size() != ctx.dimension()) throw std::invalid_argument("point has wrong dimension");
  std::vector<Complex> out(x.size(), Complex(0.0, 0.0));
  for (const auto& [key, c] : X.terms()) {
    Complex m = ScalarTraits<S>::to_complex(c);
    for (const auto& [h, e] : key.q.entries())
      m *= std::pow(x[static_cast<std::size_t>(ctx.index_of(h))], e);
    out[static_cast<std::size_t>(ctx.index_of(key.k))] += m;
  }
  return out;
}

template <class S>
Complex evaluate(const ScalarSeries<S>& f, const std::vector<Complex>& x) {
  const auto& ctx = f.context();
  if (x.size() != ctx.dimension()) throw std::invalid_argument("point has wrong dimension");
  Complex out(0.0, 0.0);
  for (const auto& [q, c] : f.terms()) {
    Complex m = ScalarTraits<S>::to_complex(c);
    for (const auto& [h, e] : q.entries())
      m *= std::pow(x[static_cast<std::size_t>(ctx.index_of(h))], e);
    out += m;
  }
  return out;
}

template <class S>
VectorField<Complex> to_float(const VectorField<S>& X) {
  VectorField<Complex> out(X.context());
  for (const auto& [key, c] : X.terms()) out.add_term(key.k, key.q, ScalarTraits<S>::to_complex(c));
  return out;
}

#define RNF_INSTANTIATE(S)                                                                     \
  template class ScalarSeries<S>;                                                              \
  template class VectorField<S>;                                                               \
  template ScalarSeries<S> lie_derivative(const VectorField<S>&, const ScalarSeries<S>&);      \
  template ScalarSeries<S> multiply(const ScalarSeries<S>&, const ScalarSeries<S>&);           \
  template VectorField<S> bracket(const VectorField<S>&, const VectorField<S>&);               \
  template VectorField<S> project_degree(const VectorField<S>&, int);                          \
  template VectorField<S> project_degree_range(const VectorField<S>&, int, int);               \
  template std::pair<VectorField<S>, VectorField<S>> split_diagonal(const VectorField<S>&);    \
  template NormReport majorant_norm(const VectorField<S>&, double, double, int, std::uint64_t); \
  template std::vector<Complex> evaluate(const VectorField<S>&, const std::vector<Complex>&);  \
  template Complex evaluate(const ScalarSeries<S>&, const std::vector<Complex>&);              \
  template VectorField<Complex> to_float(const VectorField<S>&);

RNF_INSTANTIATE(GaussianRational)
RNF_INSTANTIATE(Complex)

}  // namespace rnf
