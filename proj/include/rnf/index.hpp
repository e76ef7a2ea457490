#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <utility>
#include <vector>

namespace rnf {

/// A mode (j, sigma) of the lattice index set, or a plain index i = j with
/// sigma = +1 in finite dimension.
struct ModeKey {
  int j = 0;
  int sigma = 1;

  static ModeKey finite(int i) { return ModeKey{i, 1}; }

  int weight() const { return std::max(std::abs(j), 1); }

  friend bool operator==(const ModeKey&, const ModeKey&) = default;
  friend std::strong_ordering operator<=>(const ModeKey& a, const ModeKey& b) {
    if (auto c = std::abs(a.j) <=> std::abs(b.j); c != 0) return c;
    if (auto c = a.j <=> b.j; c != 0) return c;
    return a.sigma <=> b.sigma;
  }
};

/// Finitely supported exponent vector, stored as entries sorted by mode.
/// The unsigned variant rejects negative entries.
template <bool Signed>
class BasicMultiIndex {
 public:
  using Entry = std::pair<ModeKey, int>;

  BasicMultiIndex() = default;
  BasicMultiIndex(std::initializer_list<Entry> entries);

  static BasicMultiIndex unit(ModeKey k, int count = 1);

  int operator[](ModeKey k) const;
  void add(ModeKey k, int delta);
  void set(ModeKey k, int value);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }

  /// Sum of the entries.
  int total() const;
  /// Sum of absolute values of the entries.
  int l1() const;

  BasicMultiIndex& operator+=(const BasicMultiIndex& o);
  friend BasicMultiIndex operator+(BasicMultiIndex a, const BasicMultiIndex& b) {
    a += b;
    return a;
  }

  friend bool operator==(const BasicMultiIndex&, const BasicMultiIndex&) = default;
  // Degree first, then lexicographic on entries.
  friend std::strong_ordering operator<=>(const BasicMultiIndex& a, const BasicMultiIndex& b) {
    if (auto c = a.l1() <=> b.l1(); c != 0) return c;
    return a.entries_ <=> b.entries_;
  }

 private:
  std::vector<Entry> entries_;
};

using MultiIndex = BasicMultiIndex<false>;
using SignedIndex = BasicMultiIndex<true>;

SignedIndex to_signed(const MultiIndex& q);
/// Throws std::invalid_argument when some entry is negative.
MultiIndex to_nonnegative(const SignedIndex& p);

/// a <= b componentwise.
bool divides(const MultiIndex& a, const MultiIndex& b);
/// b - a; requires divides(a, b).
MultiIndex quotient(const MultiIndex& b, const MultiIndex& a);
SignedIndex difference(const MultiIndex& a, const MultiIndex& b);

enum class IndexSet { finite, lattice };

struct TruncationContext {
  IndexSet index_set = IndexSet::finite;
  int mode_cutoff = 1;
  int degree_cutoff = 1;
  double theta = 0.5;
  bool momentum_enabled = false;
  double float_tolerance = 1e-12;

  static TruncationContext finite(int n, int degree_cutoff, double theta = 0.5);
  static TruncationContext lattice(int cutoff, int degree_cutoff, bool momentum = true,
                                   double theta = 0.5);

  void validate() const;
  std::vector<ModeKey> modes() const;
  std::size_t dimension() const;
  bool contains(ModeKey k) const;
  /// Position of k in modes(); -1 when outside the cutoff.
  int index_of(ModeKey k) const;
  int momentum(ModeKey k) const;

  friend bool operator==(const TruncationContext&, const TruncationContext&) = default;
};

int degree(const MultiIndex& q);
/// Sum of sigma * j * q over the support; throws std::logic_error when
/// momentum is disabled in ctx.
int momentum(const SignedIndex& p, const TruncationContext& ctx);
int momentum(const MultiIndex& q, const TruncationContext& ctx);
/// Momentum if enabled, 0 otherwise.
int momentum_or_zero(const MultiIndex& q, const TruncationContext& ctx);

/// Decreasing rearrangement of the weights of v counted with multiplicity.
std::vector<int> nhat(const MultiIndex& v);

double weight_c(const MultiIndex& q, ModeKey k, double r, double s, double theta = 0.5);

/// Sum over h of <h>^theta q_h - <k>^theta.
double weight_exponent(const MultiIndex& q, ModeKey k, double theta);

}  // namespace rnf
