#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "rnf/index.hpp"
#include "rnf/scalar.hpp"

namespace rnf {

/// Truncated power series sum f_q x^q with ||q|| <= D.
template <class S>
class ScalarSeries {
 public:
  using Map = std::map<MultiIndex, S>;

  explicit ScalarSeries(TruncationContext ctx) : ctx_(std::move(ctx)) {}

  const TruncationContext& context() const { return ctx_; }
  const Map& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool truncated() const { return truncated_; }
  void mark_truncated() { truncated_ = true; }

  /// Adds c x^q. Terms of degree above D are dropped and flagged.
  void add_term(const MultiIndex& q, const S& c);
  S coefficient(const MultiIndex& q) const;

  ScalarSeries& operator+=(const ScalarSeries& o);
  ScalarSeries& operator-=(const ScalarSeries& o);
  ScalarSeries& operator*=(const S& c);

  friend bool operator==(const ScalarSeries& a, const ScalarSeries& b) {
    return a.ctx_ == b.ctx_ && a.terms_ == b.terms_;
  }

 private:
  TruncationContext ctx_;
  Map terms_;
  bool truncated_ = false;
};

/// Key of a monomial vector field x^q d/dx_k.
struct TermKey {
  ModeKey k;
  MultiIndex q;
  friend bool operator==(const TermKey&, const TermKey&) = default;
  friend std::strong_ordering operator<=>(const TermKey& a, const TermKey& b) {
    if (auto c = a.k <=> b.k; c != 0) return c;
    return a.q <=> b.q;
  }
};

/// Truncated vector field sum c x^q d/dx_k with 1 <= ||q|| and ||q|| - 1 <= D.
template <class S>
class VectorField {
 public:
  using Map = std::map<TermKey, S>;

  explicit VectorField(TruncationContext ctx) : ctx_(std::move(ctx)) {}

  const TruncationContext& context() const { return ctx_; }
  const Map& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool truncated() const { return truncated_; }
  void mark_truncated() { truncated_ = true; }

  void add_term(ModeKey k, const MultiIndex& q, const S& c);
  S coefficient(ModeKey k, const MultiIndex& q) const;

  /// Smallest scaling degree ||q|| - 1 present; -1 for the zero field.
  int order() const;
  int max_degree() const;

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(const S& c);
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  VectorField operator-() const;

  friend bool operator==(const VectorField& a, const VectorField& b) {
    return a.ctx_ == b.ctx_ && a.terms_ == b.terms_;
  }

 private:
  void insert_unchecked(const TermKey& key, const S& c);

  TruncationContext ctx_;
  Map terms_;
  bool truncated_ = false;

  template <class T>
  friend VectorField<T> bracket(const VectorField<T>&, const VectorField<T>&);
};

/// Scaling degree of the monomial field x^q d/dx_k.
inline int scaling_degree(const TermKey& key) { return key.q.total() - 1; }

template <class S>
ScalarSeries<S> lie_derivative(const VectorField<S>& X, const ScalarSeries<S>& f);

template <class S>
ScalarSeries<S> multiply(const ScalarSeries<S>& f, const ScalarSeries<S>& g);

template <class S>
VectorField<S> bracket(const VectorField<S>& X, const VectorField<S>& Y);

template <class S>
VectorField<S> project_degree(const VectorField<S>& X, int d);

/// Terms with lo <= scaling degree <= hi.
template <class S>
VectorField<S> project_degree_range(const VectorField<S>& X, int lo, int hi);

template <class S, class Pred>
VectorField<S> project_set(const VectorField<S>& X, Pred&& keep) {
  VectorField<S> out(X.context());
  for (const auto& [key, c] : X.terms())
    if (keep(key.q, key.k)) out.add_term(key.k, key.q, c);
  return out;
}

/// Splits into the diagonal part (q_k >= 1 in direction k) and the rest.
template <class S>
std::pair<VectorField<S>, VectorField<S>> split_diagonal(const VectorField<S>& X);

struct NormReport {
  double upper = 0.0;
  double lower = 0.0;
  double r = 0.0;
  double s = 0.0;
};

/// Coefficient-sum upper bound and sampled lower bound of the majorant norm.
template <class S>
NormReport majorant_norm(const VectorField<S>& X, double r, double s, int samples = 64,
                         std::uint64_t seed = 0x5eed);

/// Point evaluation; x is indexed by context().modes().
template <class S>
std::vector<Complex> evaluate(const VectorField<S>& X, const std::vector<Complex>& x);

template <class S>
Complex evaluate(const ScalarSeries<S>& f, const std::vector<Complex>& x);

/// Converts coefficients to floating point.
template <class S>
VectorField<Complex> to_float(const VectorField<S>& X);

}  // namespace rnf
