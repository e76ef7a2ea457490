#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rnf/field.hpp"

namespace rnf {

/// A real number treated as rationally independent from the other symbols.
/// The exact value is used for exact-mode coefficients, the double for numerics.
struct Symbol {
  std::string name;
  Rational exact;
  double value = 0.0;
};

/// Linear combination sum c_s * symbol_s with Gaussian rational coefficients.
class SymbolicValue {
 public:
  SymbolicValue() = default;
  explicit SymbolicValue(std::vector<GaussianRational> coords) : coords_(std::move(coords)) {}

  static SymbolicValue basis(std::size_t n, std::size_t s, GaussianRational c = 1);

  const std::vector<GaussianRational>& coords() const { return coords_; }
  bool is_zero() const;
  /// this += c * o
  void axpy(long c, const SymbolicValue& o);

  SymbolicValue& operator+=(const SymbolicValue& o);
  SymbolicValue& operator-=(const SymbolicValue& o);
  friend SymbolicValue operator-(SymbolicValue a, const SymbolicValue& b) { return a -= b; }
  friend bool operator==(const SymbolicValue& a, const SymbolicValue& b);

 private:
  std::vector<GaussianRational> coords_;
};

class FrequencyModel {
 public:
  std::size_t add_symbol(std::string name, Rational exact, double value);
  /// Numeric symbol; the exact stand-in is the best rational with denominator <= max_den.
  std::size_t add_symbol(std::string name, double value, long max_den = 10000);
  const std::vector<Symbol>& symbols() const { return symbols_; }
  std::optional<std::size_t> find_symbol(const std::string& name) const;

  void set_lambda(ModeKey k, SymbolicValue v);
  const SymbolicValue& lambda(ModeKey k) const;
  const std::map<ModeKey, SymbolicValue>& lambdas() const { return lambda_; }

  Complex numeric(const SymbolicValue& v) const;
  GaussianRational exact(const SymbolicValue& v) const;
  /// Coefficient of the requested arithmetic. Throws NumericCollision when a
  /// symbolically nonzero value evaluates to zero.
  template <class S>
  S value(const SymbolicValue& v) const;

  SymbolicValue dot(const SignedIndex& p) const;
  SymbolicValue dot(const MultiIndex& q) const;
  /// lambda . (q - e_k)
  SymbolicValue divisor(const MultiIndex& q, ModeKey k) const;

  /// Every mode of ctx has a nonzero frequency; throws ZeroFrequency or InputError.
  void validate(const TruncationContext& ctx) const;

  // Reference frequencies <k>^alpha e^{i phi_k} used by the small-divisor audits.
  double alpha = 2.0;
  std::map<ModeKey, double> phases;
  std::optional<double> phase_separation_C;

  bool has_phases(const TruncationContext& ctx) const;
  Complex reference(ModeKey k) const;
  /// max_k |lambda_k - <k>^alpha e^{i phi_k}| over the modes of ctx.
  double reference_defect(const TruncationContext& ctx) const;
  /// min over lattice modes of |e^{i phi_(j,s)} - e^{i phi_(-j,-s)}|; nullopt in finite dimension.
  std::optional<double> phase_separation(const TruncationContext& ctx) const;

 private:
  std::vector<Symbol> symbols_;
  std::map<ModeKey, SymbolicValue> lambda_;
};

/// D(lambda) = sum lambda_k x_k d/dx_k.
template <class S>
VectorField<S> linear_field(const FrequencyModel& model, const TruncationContext& ctx);

}  // namespace rnf
