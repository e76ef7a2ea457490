#include "rnf/index.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace rnf {

namespace {

template <class Vec>
auto find_mode(Vec& entries, ModeKey k) {
  return std::lower_bound(entries.begin(), entries.end(), k,
                          [](const auto& e, ModeKey key) { return e.first < key; });
}

}  // namespace

template <bool Signed>
BasicMultiIndex<Signed>::BasicMultiIndex(std::initializer_list<Entry> entries) {
  for (const auto& [k, v] : entries) add(k, v);
}

template <bool Signed>
BasicMultiIndex<Signed> BasicMultiIndex<Signed>::unit(ModeKey k, int count) {
  BasicMultiIndex r;
  r.add(k, count);
  return r;
}

template <bool Signed>
int BasicMultiIndex<Signed>::operator[](ModeKey k) const {
  auto it = find_mode(entries_, k);
  return (it != entries_.end() && it->first == k) ? it->second : 0;
}

template <bool Signed>
void BasicMultiIndex<Signed>::add(ModeKey k, int delta) {
  if (delta == 0) return;
  auto it = find_mode(entries_, k);
  if (it != entries_.end() && it->first == k) {
    int v = it->second + delta;
    if constexpr (!Signed) {
      if (v < 0) throw std::invalid_argument("negative exponent in nonnegative multi-index");
    }
    if (v == 0)
      entries_.erase(it);
    else
      it->second = v;
  } else {
    if constexpr (!Signed) {
      if (delta < 0) throw std::invalid_argument("negative exponent in nonnegative multi-index");
    }
    entries_.insert(it, Entry{k, delta});
  }
}

template <bool Signed>
void BasicMultiIndex<Signed>::set(ModeKey k, int value) {
  add(k, value - (*this)[k]);
}

template <bool Signed>
int BasicMultiIndex<Signed>::total() const {
  int s = 0;
  for (const auto& e : entries_) s += e.second;
  return s;
}

template <bool Signed>
int BasicMultiIndex<Signed>::l1() const {
  int s = 0;
  for (const auto& e : entries_) s += std::abs(e.second);
  return s;
}

template <bool Signed>
BasicMultiIndex<Signed>& BasicMultiIndex<Signed>::operator+=(const BasicMultiIndex& o) {
  std::vector<Entry> out;
  out.reserve(entries_.size() + o.entries_.size());
  auto a = entries_.begin();
  auto b = o.entries_.begin();
  while (a != entries_.end() || b != o.entries_.end()) {
    if (b == o.entries_.end() || (a != entries_.end() && a->first < b->first)) {
      out.push_back(*a++);
    } else if (a == entries_.end() || b->first < a->first) {
      out.push_back(*b++);
    } else {
      int v = a->second + b->second;
      if (v != 0) out.emplace_back(a->first, v);
      ++a;
      ++b;
    }
  }
  entries_ = std::move(out);
  return *this;
}

template class BasicMultiIndex<false>;
template class BasicMultiIndex<true>;

SignedIndex to_signed(const MultiIndex& q) {
  SignedIndex p;
  for (const auto& [k, v] : q.entries()) p.add(k, v);
  return p;
}

MultiIndex to_nonnegative(const SignedIndex& p) {
  MultiIndex q;
  for (const auto& [k, v] : p.entries()) q.add(k, v);
  return q;
}

bool divides(const MultiIndex& a, const MultiIndex& b) {
  auto bi = b.entries().begin();
  for (const auto& [k, v] : a.entries()) {
    while (bi != b.entries().end() && bi->first < k) ++bi;
    if (bi == b.entries().end() || bi->first != k || bi->second < v) return false;
  }
  return true;
}

MultiIndex quotient(const MultiIndex& b, const MultiIndex& a) {
  MultiIndex r = b;
  for (const auto& [k, v] : a.entries()) r.add(k, -v);
  return r;
}

SignedIndex difference(const MultiIndex& a, const MultiIndex& b) {
  SignedIndex r = to_signed(a);
  for (const auto& [k, v] : b.entries()) r.add(k, -v);
  return r;
}

TruncationContext TruncationContext::finite(int n, int degree_cutoff, double theta) {
  TruncationContext c;
  c.index_set = IndexSet::finite;
  c.mode_cutoff = n;
  c.degree_cutoff = degree_cutoff;
  c.theta = theta;
  c.momentum_enabled = false;
  c.validate();
  return c;
}

TruncationContext TruncationContext::lattice(int cutoff, int degree_cutoff, bool momentum,
                                             double theta) {
  TruncationContext c;
  c.index_set = IndexSet::lattice;
  c.mode_cutoff = cutoff;
  c.degree_cutoff = degree_cutoff;
  c.theta = theta;
  c.momentum_enabled = momentum;
  c.validate();
  return c;
}

void TruncationContext::validate() const {
  if (degree_cutoff < 1) throw std::invalid_argument("degree cutoff must be at least 1");
  if (mode_cutoff < 0) throw std::invalid_argument("mode cutoff must be nonnegative");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0,1)");
  if (index_set == IndexSet::finite) {
    if (mode_cutoff < 1) throw std::invalid_argument("finite dimension must be at least 1");
    if (momentum_enabled) throw std::invalid_argument("momentum is undefined in finite dimension");
  }
  if (!(float_tolerance >= 0.0)) throw std::invalid_argument("tolerance must be nonnegative");
}

std::vector<ModeKey> TruncationContext::modes() const {
  std::vector<ModeKey> out;
  if (index_set == IndexSet::finite) {
    for (int i = 1; i <= mode_cutoff; ++i) out.push_back(ModeKey::finite(i));
    return out;
  }
  out.push_back({0, -1});
  out.push_back({0, 1});
  for (int a = 1; a <= mode_cutoff; ++a) {
    for (int j : {-a, a}) {
      out.push_back({j, -1});
      out.push_back({j, 1});
    }
  }
  return out;
}

std::size_t TruncationContext::dimension() const {
  return index_set == IndexSet::finite ? static_cast<std::size_t>(mode_cutoff)
                                       : static_cast<std::size_t>(2 * (2 * mode_cutoff + 1));
}

bool TruncationContext::contains(ModeKey k) const {
  if (k.sigma != 1 && k.sigma != -1) return false;
  if (index_set == IndexSet::finite) return k.sigma == 1 && k.j >= 1 && k.j <= mode_cutoff;
  return std::abs(k.j) <= mode_cutoff;
}

int TruncationContext::index_of(ModeKey k) const {
  if (!contains(k)) return -1;
  if (index_set == IndexSet::finite) return k.j - 1;
  // Order: (0,-),(0,+), then for a = |j| >= 1: (-a,-),(-a,+),(a,-),(a,+).
  int s = k.sigma < 0 ? 0 : 1;
  if (k.j == 0) return s;
  int a = std::abs(k.j);
  int base = 2 + 4 * (a - 1);
  return base + (k.j < 0 ? 0 : 2) + s;
}

int TruncationContext::momentum(ModeKey k) const {
  return momentum_enabled ? k.sigma * k.j : 0;
}

int degree(const MultiIndex& q) { return q.total(); }

int momentum(const SignedIndex& p, const TruncationContext& ctx) {
  if (!ctx.momentum_enabled) throw std::logic_error("momentum is disabled in this context");
  int m = 0;
  for (const auto& [k, v] : p.entries()) m += k.sigma * k.j * v;
  return m;
}

int momentum(const MultiIndex& q, const TruncationContext& ctx) {
  if (!ctx.momentum_enabled) throw std::logic_error("momentum is disabled in this context");
  int m = 0;
  for (const auto& [k, v] : q.entries()) m += k.sigma * k.j * v;
  return m;
}

int momentum_or_zero(const MultiIndex& q, const TruncationContext& ctx) {
  return ctx.momentum_enabled ? momentum(q, ctx) : 0;
}

std::vector<int> nhat(const MultiIndex& v) {
  if (v.total() < 2) throw std::invalid_argument("nhat requires degree at least 2");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(v.total()));
  for (const auto& [k, n] : v.entries())
    for (int i = 0; i < n; ++i) out.push_back(k.weight());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double weight_exponent(const MultiIndex& q, ModeKey k, double theta) {
  double e = -std::pow(static_cast<double>(k.weight()), theta);
  for (const auto& [h, n] : q.entries()) e += n * std::pow(static_cast<double>(h.weight()), theta);
  return e;
}

double weight_c(const MultiIndex& q, ModeKey k, double r, double s, double theta) {
  int d = q.total();
  if (d < 1) throw std::invalid_argument("weight_c requires |q| >= 1");
  double logprod = 0.0;
  for (const auto& [h, n] : q.entries()) logprod += n * std::log(static_cast<double>(h.weight()));
  double ratio = std::exp(std::log(static_cast<double>(k.weight())) - logprod);
  return std::pow(r, d - 1) * ratio * ratio * std::exp(-s * weight_exponent(q, k, theta));
}

}  // namespace rnf
